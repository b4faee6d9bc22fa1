#include "conewalk/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "conewalk/bessel.hpp"
#include "conewalk/fitting.hpp"
#include "conewalk/rng.hpp"

namespace cw::bm {

namespace {

constexpr double kPi = std::numbers::pi;

double gauss1(double z, double t) {
    return std::exp(-z * z / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
    std::vector<double> node, weight;

    explicit GaussLegendre(int n) {
        node.resize(n);
        weight.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            node[i] = -x;
            node[n - 1 - i] = x;
            weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }

    template <class F>
    double integrate(double a, double b, F&& f) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (size_t i = 0; i < node.size(); ++i)
            s += weight[i] * f(mid + half * node[i]);
        return s * half;
    }
};

const GaussLegendre& gl96() {
    static const GaussLegendre g(96);
    return g;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

double halfline_kernel(double x, double y, double t) {
    if (x < 0.0 || y < 0.0)
        fail(ErrorCode::PointOutsideCone, "half-line kernel needs x, y >= 0");
    return gauss1(y - x, t) - gauss1(y + x, t);
}

double halfline_survival(double x, double t) {
    if (x < 0.0)
        fail(ErrorCode::PointOutsideCone, "half-line survival needs x >= 0");
    return std::erf(x / std::sqrt(2.0 * t));
}

double halfspace_kernel(const HalfSpace& hs, const std::vector<double>& x,
                        const std::vector<double>& y, double t) {
    const double hx = dot(hs.normal, x);
    const double hy = dot(hs.normal, y);
    if (hx < 0.0 || hy < 0.0)
        fail(ErrorCode::PointOutsideCone, "points must lie in the half-space");
    // reflect x through the boundary plane
    std::vector<double> xr(x);
    for (size_t i = 0; i < x.size(); ++i) xr[i] -= 2.0 * hx * hs.normal[i];
    const int d = int(x.size());
    const double c = std::pow(2.0 * kPi * t, -0.5 * d);
    return c * (std::exp(-dist2(y, x) / (2.0 * t)) - std::exp(-dist2(y, xr) / (2.0 * t)));
}

double halfspace_survival(const HalfSpace& hs, const std::vector<double>& x, double t) {
    const double h = dot(hs.normal, x);
    if (h < 0.0)
        fail(ErrorCode::PointOutsideCone, "point must lie in the half-space");
    return std::erf(h / std::sqrt(2.0 * t));
}

double orthant_kernel(const std::vector<double>& x, const std::vector<double>& y, double t) {
    double prod = 1.0;
    for (size_t i = 0; i < x.size(); ++i) prod *= halfline_kernel(x[i], y[i], t);
    return prod;
}

double orthant_survival(const std::vector<double>& x, double t) {
    double prod = 1.0;
    for (double xi : x) prod *= halfline_survival(xi, t);
    return prod;
}

WedgeKernel::WedgeKernel(double beta, int terms, double tolerance)
    : beta_(beta), terms_(terms), tol_(tolerance) {
    if (beta <= 0.0 || beta > kPi)
        fail(ErrorCode::ConfigError, "wedge opening must lie in (0, pi]");
    // Normalization is calibrated, not hard-coded: at a time scale small
    // against the boundary distance the survival probability is 1 up to
    // far below the series tolerance.
    const double half = std::sin(0.5 * beta_);
    const double t_cal = half * half / 128.0;
    const double raw = survival_raw(1.0, 0.5 * beta_, t_cal);
    if (!(raw > 0.0))
        fail(ErrorCode::InternalError, "wedge normalization calibration failed");
    norm_ = 1.0 / raw;
}

double WedgeKernel::series(double r, double theta, double rho, double phi, double t,
                           double* last_ratio) const {
    const double nu1 = kPi / beta_;
    const double z = r * rho / t;
    double sum = 0.0, last = 0.0;
    int j = 1;
    for (; j <= terms_; ++j) {
        const double bi = besseli_scaled(j * nu1, z);
        sum += bi * std::sin(j * nu1 * theta) * std::sin(j * nu1 * phi);
        last = bi;
        if (bi < tol_ * std::max(std::abs(sum), 1e-300)) break;
    }
    if (j > terms_ && last >= tol_ * std::max(std::abs(sum), 1e-300))
        fail(ErrorCode::SeriesNotConverged, "wedge eigenfunction series did not converge");
    if (last_ratio)
        *last_ratio = std::abs(sum) > 0.0 ? last / std::abs(sum) : 0.0;
    return sum;
}

double WedgeKernel::kernel_polar(double r, double theta, double rho, double phi,
                                 double t) const {
    if (theta < 0.0 || theta > beta_ || phi < 0.0 || phi > beta_)
        fail(ErrorCode::PointOutsideCone, "polar angle outside the wedge");
    const double s = series(r, theta, rho, phi, t, nullptr);
    return (norm_ / t) * std::exp(-(r - rho) * (r - rho) / (2.0 * t)) * s;
}

double WedgeKernel::survival_raw(double r, double theta, double t) const {
    // angular integral of sin(j pi phi / beta) over (0, beta) is analytic;
    // the radial one is a narrow Gaussian around rho = r.
    const double nu1 = kPi / beta_;
    const double w = 8.0 * std::sqrt(t);
    const double lo = std::max(0.0, r - w), hi = r + w;
    return gl96().integrate(lo, hi, [&](double rho) {
        const double z = r * rho / t;
        double sum = 0.0, last = 0.0;
        int j = 1;
        for (; j <= terms_; ++j) {
            const double bi = besseli_scaled(j * nu1, z);
            if (j % 2 == 1) {
                sum += bi * std::sin(j * nu1 * theta) * (2.0 * beta_ / (j * kPi));
            }
            last = bi;
            if (bi < tol_ * std::max(std::abs(sum), 1e-300)) break;
        }
        if (j > terms_ && last >= tol_ * std::max(std::abs(sum), 1e-300))
            fail(ErrorCode::SeriesNotConverged, "wedge survival series did not converge");
        return std::exp(-(r - rho) * (r - rho) / (2.0 * t)) * sum * rho / t;
    });
}

double WedgeKernel::survival_polar(double r, double theta, double t) const {
    if (theta < 0.0 || theta > beta_)
        fail(ErrorCode::PointOutsideCone, "polar angle outside the wedge");
    if (r == 0.0) return 0.0;
    return norm_ * survival_raw(r, theta, t);
}

KernelEvaluator::KernelEvaluator(const ConeSpec& cone, int series_terms, double tolerance)
    : cone_(cone), terms_(series_terms), tol_(tolerance) {
    if (const auto* w = std::get_if<Wedge2D>(&cone.variant()))
        wedge_ = std::make_shared<WedgeKernel>(w->beta, terms_, tol_);
    else if (std::holds_alternative<WeylChamberA>(cone.variant()) ||
             std::holds_alternative<Polyhedral>(cone.variant()))
        fail(ErrorCode::NoClosedForm, "no closed-form heat kernel for this cone");
}

namespace {

std::pair<double, double> to_polar(const Wedge2D& w, const std::vector<double>& x) {
    double r = std::hypot(x[0], x[1]);
    double th = std::atan2(x[1], x[0]) - w.base;
    th = std::fmod(th, 2.0 * kPi);
    if (th < 0) th += 2.0 * kPi;
    return {r, th};
}

} // namespace

double KernelEvaluator::kernel(const std::vector<double>& x, const std::vector<double>& y,
                               double t) const {
    if (const auto* hs = std::get_if<HalfSpace>(&cone_.variant()))
        return halfspace_kernel(*hs, x, y, t);
    if (std::holds_alternative<Orthant>(cone_.variant()))
        return orthant_kernel(x, y, t);
    const auto& w = std::get<Wedge2D>(cone_.variant());
    auto [r, th] = to_polar(w, x);
    auto [rho, phi] = to_polar(w, y);
    return wedge_->kernel_polar(r, th, rho, phi, t);
}

double KernelEvaluator::survival(const std::vector<double>& x, double t) const {
    if (const auto* hs = std::get_if<HalfSpace>(&cone_.variant()))
        return halfspace_survival(*hs, x, t);
    if (std::holds_alternative<Orthant>(cone_.variant()))
        return orthant_survival(x, t);
    const auto& w = std::get<Wedge2D>(cone_.variant());
    auto [r, th] = to_polar(w, x);
    return wedge_->survival_polar(r, th, t);
}

AsymptoticConstants fit_asymptotic_constants(const ConeSpec& cone, const ReduiteFn& u) {
    KernelEvaluator ev(cone);
    const int d = cone.dim();

    // evaluation point on the cone's center ray, unit distance from the apex
    std::vector<double> x;
    std::visit([&](auto&& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            x = c.normal;
        } else if constexpr (std::is_same_v<T, Orthant>) {
            x.assign(size_t(c.dim), 1.0 / std::sqrt(double(c.dim)));
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            double a = c.base + 0.5 * c.beta;
            x = {std::cos(a), std::sin(a)};
        } else {
            fail(ErrorCode::NoClosedForm, "no closed-form heat kernel for this cone");
        }
    }, cone.variant());

    AsymptoticConstants out;
    out.t_min = 1e2;
    out.t_max = 1e4;
    const int grid = 13;
    std::vector<double> chis(grid), chi0s(grid), ts(grid);
    const double ux = u.eval(x);
    double n2 = dot(x, x);
    for (int i = 0; i < grid; ++i) {
        double t = out.t_min * std::pow(out.t_max / out.t_min, double(i) / (grid - 1));
        ts[i] = t;
        chis[i] = ev.survival(x, t) * std::pow(t, 0.5 * u.p()) / ux;
        chi0s[i] = ev.kernel(x, x, t) * std::pow(t, 0.5 * d + u.p()) /
                   (ux * ux * std::exp(-n2 / (2.0 * t)));
    }
    out.chi = chis[grid - 1];
    out.chi0 = chi0s[grid - 1];
    for (int i = grid / 2; i < grid; ++i) {
        out.fit_residual = std::max(out.fit_residual, std::abs(chis[i] / out.chi - 1.0));
        out.fit_residual = std::max(out.fit_residual, std::abs(chi0s[i] / out.chi0 - 1.0));
    }
    if (!(out.chi > 0.0) || !(out.chi0 > 0.0) || out.fit_residual > 0.05)
        fail(ErrorCode::FitDiverged, "asymptotic-constant fit did not stabilize");
    return out;
}

namespace {

// unit inward "center ray" direction and the admissible clearance rate c0
std::pair<std::vector<double>, double> center_direction(const ConeSpec& cone) {
    return std::visit([&](auto&& c) -> std::pair<std::vector<double>, double> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            return {c.normal, 0.5};
        } else if constexpr (std::is_same_v<T, Orthant>) {
            std::vector<double> w(size_t(c.dim), 1.0 / std::sqrt(double(c.dim)));
            return {w, 0.5 / std::sqrt(double(c.dim))};
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            double a = c.base + 0.5 * c.beta;
            return {{std::cos(a), std::sin(a)}, 0.5 * std::sin(0.5 * c.beta)};
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            // sum of the normalized wall normals (e_{i+1} - e_i)/sqrt(2)
            std::vector<double> w(size_t(c.dim), 0.0);
            for (int i = 0; i + 1 < c.dim; ++i) {
                w[size_t(i)] -= 1.0 / std::sqrt(2.0);
                w[size_t(i) + 1] += 1.0 / std::sqrt(2.0);
            }
            double n = std::sqrt(dot(w, w));
            for (double& v : w) v /= n;
            double c0 = 1e300;
            for (int i = 0; i + 1 < c.dim; ++i)
                c0 = std::min(c0, (w[size_t(i) + 1] - w[size_t(i)]) / std::sqrt(2.0));
            return {w, 0.5 * c0};
        } else {
            std::vector<double> w(c.normals[0].size(), 0.0);
            for (const auto& nrm : c.normals)
                for (size_t i = 0; i < w.size(); ++i) w[i] += nrm[i];
            double n = std::sqrt(dot(w, w));
            if (n == 0.0)
                fail(ErrorCode::ConfigError, "degenerate polyhedral cone");
            for (double& v : w) v /= n;
            double c0 = 1e300;
            for (const auto& nrm : c.normals) c0 = std::min(c0, dot(w, nrm));
            if (c0 <= 0.0)
                fail(ErrorCode::ConfigError, "no interior center direction");
            return {w, 0.5 * c0};
        }
    }, cone.variant());
}

} // namespace

std::vector<double> pick_xt(const ConeSpec& cone, const std::vector<double>& x, double t) {
    auto [w, c0] = center_direction(cone);
    if (cone.contains(x) && cone.dist_boundary(x) >= c0 * t) return x;
    std::vector<double> out(x);
    for (size_t i = 0; i < out.size(); ++i) out[i] += t * w[i];
    return out;
}

double ball_cone_volume(const ConeSpec& cone, const std::vector<double>& z, double r) {
    const int d = cone.dim();
    if (d > 3)
        fail(ErrorCode::ConfigError, "ball-cone volume limited to d <= 3");

    // Recursive slicing: at each level integrate over one coordinate; the
    // innermost slice of ball-cap-cone is an interval (both sets convex),
    // located by probing then bisection.
    std::vector<double> pt(size_t(d), 0.0);
    auto interval_len = [&](double lo, double hi) -> double {
        const int last = d - 1;
        auto inside = [&](double v) {
            pt[size_t(last)] = v;
            double n2 = 0.0;
            for (int i = 0; i < d; ++i) n2 += (pt[size_t(i)] - z[size_t(i)]) * (pt[size_t(i)] - z[size_t(i)]);
            return n2 <= r * r && cone.contains_closed(pt);
        };
        double seed_v = 0.0;
        bool found = false;
        for (int k = 0; k <= 64; ++k) {
            double v = lo + (hi - lo) * k / 64.0;
            if (inside(v)) { seed_v = v; found = true; break; }
        }
        if (!found) return 0.0;
        double a0 = lo, a1 = seed_v;
        for (int it = 0; it < 60; ++it) {
            double m = 0.5 * (a0 + a1);
            (inside(m) ? a1 : a0) = m;
        }
        double b0 = seed_v, b1 = hi;
        for (int it = 0; it < 60; ++it) {
            double m = 0.5 * (b0 + b1);
            (inside(m) ? b0 : b1) = m;
        }
        return std::max(0.0, b0 - a1);
    };

    std::function<double(int)> level = [&](int axis) -> double {
        const double lo = z[size_t(axis)] - r, hi = z[size_t(axis)] + r;
        if (axis == d - 1) return interval_len(lo, hi);
        return gl96().integrate(lo, hi, [&](double v) {
            pt[size_t(axis)] = v;
            return level(axis + 1);
        });
    };
    return level(0);
}

BoundCheckReport check_gaussian_bounds(const ConeSpec& cone, int samples,
                                       unsigned long long seed) {
    KernelEvaluator ev(cone);
    ReduiteFn u = reduite_for(cone);
    const int d = cone.dim();
    BoundCheckReport out;
    out.samples = samples;

    auto draw_hat = [&](CounterRng& rng) {
        // points at O(1) scale, clear of the boundary
        for (;;) {
            std::vector<double> x(static_cast<size_t>(d), 0.0);
            for (int i = 0; i < d; ++i) x[size_t(i)] = -2.5 + 5.0 * rng.next_double();
            if (!cone.contains(x)) continue;
            double nrm = std::sqrt(dot(x, x));
            if (nrm < 0.3 || nrm > 2.5) continue;
            if (cone.dist_boundary(x) < 0.1) continue;
            return x;
        }
    };

    const std::vector<double> t_grid = {1.0, 3.1622776601683795, 10.0,
                                        31.622776601683793, 100.0};
    std::vector<double> qs, logR;
    std::vector<double> Rs;
    out.survival_ratio_min = out.kernel_ratio_min = out.scaling_ratio_min = 1e300;
    out.survival_ratio_max = out.kernel_ratio_max = out.scaling_ratio_max = -1e300;
    out.ball_constant = 1e300;

    // The stability claim is over t: the same point sample is re-evaluated at
    // every scale and the per-t averages must agree across the two decades.
    const size_t nt = t_grid.size();
    std::vector<double> sr_sum(nt, 0.0), kr_sum(nt, 0.0);
    std::vector<int> sr_cnt(nt, 0), kr_cnt(nt, 0);
    std::vector<size_t> tindex;
    for (int s = 0; s < samples; ++s) {
        CounterRng rng(seed, uint64_t(s));
        std::vector<double> xh = draw_hat(rng), yh = draw_hat(rng);
        std::vector<double> x(static_cast<size_t>(d), 0.0), y(static_cast<size_t>(d), 0.0);
        for (size_t ti = 0; ti < nt; ++ti) {
            const double t = t_grid[ti];
            const double st = std::sqrt(t);
            for (int i = 0; i < d; ++i) {
                x[size_t(i)] = st * xh[size_t(i)];
                y[size_t(i)] = st * yh[size_t(i)];
            }

            const double kx = ev.survival(x, t), ky = ev.survival(y, t);
            const double sr = kx * u.eval(pick_xt(cone, x, st)) / u.eval(x);
            sr_sum[ti] += sr;
            ++sr_cnt[ti];

            const double Vx = ball_cone_volume(cone, x, st);
            const double Vy = ball_cone_volume(cone, y, st);
            out.ball_constant = std::min({out.ball_constant, Vx / std::pow(st, d),
                                          Vy / std::pow(st, d)});

            const double K = ev.kernel(x, y, t);
            if (K > 0.0) {
                double R = K * std::sqrt(Vx * Vy) / (kx * ky);
                double q = dist2(x, y) / t;
                qs.push_back(q);
                logR.push_back(std::log(R));
                Rs.push_back(R);
                tindex.push_back(ti);
            }
        }
    }
    for (size_t ti = 0; ti < nt; ++ti) {
        if (sr_cnt[ti] == 0) continue;
        double mean = sr_sum[ti] / double(sr_cnt[ti]);
        out.survival_ratio_min = std::min(out.survival_ratio_min, mean);
        out.survival_ratio_max = std::max(out.survival_ratio_max, mean);
    }

    // Gaussian rate: log R ~ const - q / c3
    double sq = 0, sl = 0, sqq = 0, sql = 0;
    for (size_t i = 0; i < qs.size(); ++i) {
        sq += qs[i]; sl += logR[i]; sqq += qs[i] * qs[i]; sql += qs[i] * logR[i];
    }
    const double m = double(qs.size());
    double slope = (m * sql - sq * sl) / std::max(1e-300, m * sqq - sq * sq);
    out.fitted_c3 = slope < 0.0 ? -1.0 / slope : 1e6;
    for (size_t i = 0; i < qs.size(); ++i) {
        kr_sum[tindex[i]] += Rs[i] * std::exp(qs[i] / out.fitted_c3);
        ++kr_cnt[tindex[i]];
    }
    for (size_t ti = 0; ti < nt; ++ti) {
        if (kr_cnt[ti] == 0) continue;
        double mean = kr_sum[ti] / double(kr_cnt[ti]);
        out.kernel_ratio_min = std::min(out.kernel_ratio_min, mean);
        out.kernel_ratio_max = std::max(out.kernel_ratio_max, mean);
    }

    // scaling of kbar(x) = k_1(x) toward the apex, and its Holder behavior
    std::vector<double> hq_logd, hq_logk;
    double holder_cmax = 0.0;
    const int scal_samples = std::max(samples, 1000);
    for (int s = 0; s < scal_samples; ++s) {
        CounterRng rng(seed ^ 0x5ca1ab1eULL, uint64_t(s));
        std::vector<double> xh = draw_hat(rng);
        double sc = 0.01 + 0.99 * rng.next_double();
        std::vector<double> xs(xh);
        for (double& v : xs) v *= sc;
        double ratio = ev.survival(xs, 1.0) / ev.survival(xh, 1.0);
        out.scaling_ratio_min = std::min(out.scaling_ratio_min, ratio);
        out.scaling_ratio_max = std::max(out.scaling_ratio_max, ratio);

        // nearby pair for the Holder quotient
        std::vector<double> xp(xh);
        double step = 0.02 + 0.9 * rng.next_double();
        for (double& v : xp) v += (rng.next_double() - 0.5) * step;
        if (!cone.contains(xp)) continue;
        double dd = std::sqrt(dist2(xh, xp));
        double dk = std::abs(ev.survival(xh, 1.0) - ev.survival(xp, 1.0)) /
                    (1.0 + std::pow(std::sqrt(dot(xp, xp)), u.p() - 1.0));
        if (dd > 1e-6 && dk > 1e-14) {
            hq_logd.push_back(std::log(dd));
            hq_logk.push_back(std::log(dk));
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < hq_logd.size(); ++i) {
        sx += hq_logd[i]; sy += hq_logk[i];
        sxx += hq_logd[i] * hq_logd[i]; sxy += hq_logd[i] * hq_logk[i];
    }
    const double mh = double(hq_logd.size());
    double alpha = (mh * sxy - sx * sy) / std::max(1e-300, mh * sxx - sx * sx);
    out.holder_alpha = std::clamp(alpha, 0.05, 1.0);
    for (size_t i = 0; i < hq_logd.size(); ++i) {
        double quot = std::exp(hq_logk[i] - out.holder_alpha * hq_logd[i]);
        holder_cmax = std::max(holder_cmax, quot);
    }
    out.holder_constant = holder_cmax;
    return out;
}

} // namespace cw::bm

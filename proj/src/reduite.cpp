#include "conewalk/reduite.hpp"

#include <cmath>
#include <numbers>

#include "conewalk/rng.hpp"

namespace cw {

namespace {

double wedge_theta(const Wedge2D& w, double x, double y) {
    double th = std::atan2(y, x) - w.base;
    th = std::fmod(th, 2.0 * std::numbers::pi);
    if (th < 0) th += 2.0 * std::numbers::pi;
    return th;
}

} // namespace

ReduiteFn::ReduiteFn(ConeSpec cone, double p, double normalization)
    : cone_(std::move(cone)), p_(p), norm_(normalization) {}

double ReduiteFn::eval(const std::vector<double>& x) const {
    double v = std::visit([&x, this](auto&& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            double s = 0.0;
            for (size_t i = 0; i < x.size(); ++i) s += c.normal[i] * x[i];
            return s;
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            double r = std::hypot(x[0], x[1]);
            if (r == 0.0) return 0.0;
            double th = wedge_theta(c, x[0], x[1]);
            return std::pow(r, p_) * std::sin(p_ * th);
        } else if constexpr (std::is_same_v<T, Orthant>) {
            double prod = 1.0;
            for (double v : x) prod *= v;
            return prod;
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            double prod = 1.0;
            for (size_t i = 0; i < x.size(); ++i)
                for (size_t j = i + 1; j < x.size(); ++j) prod *= (x[j] - x[i]);
            return prod;
        } else {
            fail(ErrorCode::NoClosedForm, "no closed-form reduite for polyhedral cones");
        }
    }, cone_.variant());
    return norm_ * v;
}

std::vector<double> ReduiteFn::grad(const std::vector<double>& x) const {
    if (!cone_.contains(x))
        fail(ErrorCode::PointOutsideCone, "gradient requires an interior point");
    std::vector<double> g = std::visit([&x, this](auto&& c) -> std::vector<double> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            return c.normal;
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            // u = Im((e^{-ib} z)^p): grad = (Im f', Re f') with
            // f'(z) = p e^{-ib} (e^{-ib} z)^{p-1}
            double r = std::hypot(x[0], x[1]);
            double th = wedge_theta(c, x[0], x[1]);
            double rp = p_ * std::pow(r, p_ - 1.0);
            double a = (p_ - 1.0) * th - c.base; // argument of f'
            return {rp * std::sin(a), rp * std::cos(a)};
        } else if constexpr (std::is_same_v<T, Orthant>) {
            std::vector<double> g(x.size());
            for (size_t i = 0; i < x.size(); ++i) {
                double prod = 1.0;
                for (size_t j = 0; j < x.size(); ++j)
                    if (j != i) prod *= x[j];
                g[i] = prod;
            }
            return g;
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            double u = 1.0;
            for (size_t i = 0; i < x.size(); ++i)
                for (size_t j = i + 1; j < x.size(); ++j) u *= (x[j] - x[i]);
            std::vector<double> g(x.size());
            for (size_t k = 0; k < x.size(); ++k) {
                double s = 0.0;
                for (size_t i = 0; i < k; ++i) s += 1.0 / (x[k] - x[i]);
                for (size_t j = k + 1; j < x.size(); ++j) s -= 1.0 / (x[j] - x[k]);
                g[k] = u * s;
            }
            return g;
        } else {
            fail(ErrorCode::NoClosedForm, "no closed-form reduite for polyhedral cones");
        }
    }, cone_.variant());
    for (double& v : g) v *= norm_;
    return g;
}

ReduiteFn reduite_for(const ConeSpec& cone) {
    return std::visit([&cone](auto&& c) -> ReduiteFn {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            return ReduiteFn(cone, 1.0);
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            return ReduiteFn(cone, std::numbers::pi / c.beta);
        } else if constexpr (std::is_same_v<T, Orthant>) {
            return ReduiteFn(cone, double(c.dim));
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            return ReduiteFn(cone, double(c.dim) * (c.dim - 1) / 2.0);
        } else {
            fail(ErrorCode::NoClosedForm, "no closed-form reduite for polyhedral cones");
        }
    }, cone.variant());
}

HarmonicCheck check_harmonic(const ReduiteFn& u, int samples, double h,
                             unsigned long long seed) {
    const ConeSpec& cone = u.cone();
    const int d = cone.dim();
    CounterRng rng(seed, 0);
    HarmonicCheck out;
    while (out.points_checked < samples) {
        // sample interior points at O(1) radius, keep those clear of the
        // boundary (the closed form is only C^2 in the interior)
        std::vector<double> x(d);
        for (int i = 0; i < d; ++i) x[i] = -2.0 + 4.0 * rng.next_double();
        if (!cone.contains(x)) continue;
        if (cone.dist_boundary(x) < 10.0 * h) continue;
        double center = u.eval(x);
        double lap = 0.0;
        for (int i = 0; i < d; ++i) {
            std::vector<double> xp(x), xm(x);
            xp[i] += h;
            xm[i] -= h;
            lap += u.eval(xp) + u.eval(xm) - 2.0 * center;
        }
        lap /= h * h;
        out.max_residual = std::max(out.max_residual,
                                    std::abs(lap) / (1.0 + std::abs(center)));
        ++out.points_checked;
    }
    return out;
}

} // namespace cw

#include "conewalk/verify.hpp"

#include <algorithm>
#include <cmath>

namespace cw::verify {

double Geometry::u_at(const std::vector<int>& z) const {
    std::vector<double> zd(z.begin(), z.end());
    return u.eval(transform.apply(zd));
}

double Geometry::norm2_decor(const std::vector<int>& z) const {
    std::vector<double> zd(z.begin(), z.end());
    auto m = transform.apply(zd);
    double s = 0.0;
    for (double v : m) s += v * v;
    return s;
}

double Geometry::dist_boundary_decor(const std::vector<int>& z) const {
    std::vector<double> zd(z.begin(), z.end());
    return cone_decor.dist_boundary(transform.apply(zd));
}

Geometry make_geometry(const StepDistribution& model, const ConeSpec& cone_lattice) {
    ModelReport report = validate_model(model, cone_lattice);
    auto [real_steps, transform] = decorrelate(model);
    (void)real_steps;
    ConeSpec cone_decor = transform_cone(cone_lattice, transform);
    ReduiteFn u = reduite_for(cone_decor);
    return Geometry{model,       cone_lattice, transform, cone_decor,
                    u,           u.p(),        report.period, report};
}

std::vector<std::pair<long long, double>>
restrict_residue_class(const std::vector<std::pair<long long, double>>& series, int q,
                       int* residue_out) {
    if (q <= 1) {
        std::vector<std::pair<long long, double>> out;
        for (const auto& p : series)
            if (p.second > 0.0) out.push_back(p);
        if (residue_out) *residue_out = 0;
        return out;
    }
    int residue = -1;
    std::vector<std::pair<long long, double>> out;
    for (const auto& [n, v] : series) {
        if (v <= 0.0) continue;
        int r = int(n % q);
        if (residue < 0) residue = r;
        else if (r != residue)
            fail(ErrorCode::ConfigError,
                 "series mixes residue classes; restrict before fitting");
        out.emplace_back(n, v);
    }
    if (residue_out) *residue_out = std::max(residue, 0);
    return out;
}

ExponentCheck verify_survival_exponent(const Geometry& g, const std::vector<int>& x,
                                       long long window_min, long long window_max,
                                       double tolerance, exact::TruncationPolicy policy) {
    auto series = exact::survival(g.model, g.cone_lattice, x, window_max, policy);
    // survival is positive in every residue class; fit on one to suppress
    // the parity wobble of periodic walks
    const int q = std::max(1, g.period);
    const int residue = int(window_max % q);
    std::vector<std::pair<long long, double>> pairs;
    for (long long n = 1; n <= window_max; ++n)
        if (n % q == residue) pairs.emplace_back(n, series.values[size_t(n)]);

    ExponentCheck out;
    out.fit = fit_loglog(pairs, window_min, window_max);
    out.expected_slope = -0.5 * g.p;
    out.tolerance = tolerance;
    out.period = q;
    out.residue = residue;
    out.pass = std::abs(out.fit.slope - out.expected_slope) <= tolerance;
    return out;
}

ExponentCheck verify_llt_exponent(const Geometry& g, const std::vector<int>& x,
                                  long long window_min, long long window_max,
                                  double tolerance, bool unconstrained,
                                  exact::TruncationPolicy policy) {
    auto killing = unconstrained ? exact::Killing::None : exact::Killing::Open;
    auto bundle = exact::run_series(g.model, g.cone_lattice, x, window_max, &x, nullptr,
                                    policy, killing);
    std::vector<std::pair<long long, double>> series;
    for (long long n = 1; n <= window_max; ++n)
        series.emplace_back(n, bundle.local_at_y[size_t(n)]);

    ExponentCheck out;
    auto pairs = restrict_residue_class(series, std::max(1, g.period), &out.residue);
    out.fit = fit_loglog(pairs, window_min, window_max);
    out.expected_slope = unconstrained ? -0.5 * g.model.dim : -(g.p + 0.5 * g.model.dim);
    out.tolerance = tolerance;
    out.period = std::max(1, g.period);
    out.pass = std::abs(out.fit.slope - out.expected_slope) <= tolerance;
    return out;
}

RegimeReport verify_interior_llt(const Geometry& g, const std::vector<int>& x,
                                 long long n, double A, double epsilon,
                                 exact::TruncationPolicy policy) {
    exact::LayerEngine<double> eng(g.model, g.cone_lattice, x, policy);
    for (long long i = 0; i < n; ++i) eng.advance();

    const double threshold = shrunken_threshold(n, epsilon);
    const double A2n = A * A * double(n);
    std::vector<double> ratios;
    for (const auto& [y, mass] : eng.to_sparse()) {
        if (mass <= 0.0) continue;
        if (g.norm2_decor(y) > A2n) continue;
        std::vector<double> yd(y.begin(), y.end());
        auto my = g.transform.apply(yd);
        if (!g.cone_decor.contains(my)) continue;
        if (g.cone_decor.dist_boundary(my) < threshold) continue;
        double pred = g.u.eval(my) * std::exp(-g.norm2_decor(y) / (2.0 * double(n)));
        if (pred <= 0.0) continue;
        ratios.push_back(mass / pred);
    }
    if (ratios.empty())
        fail(ErrorCode::EmptyGrid, "no lattice points qualify in the shrunken cone");

    std::sort(ratios.begin(), ratios.end());
    RegimeReport out;
    out.grid_size = int(ratios.size());
    out.n = n;
    out.period_class = int(n % std::max(1, g.period));
    out.ratio_spread = ratios.back() / ratios.front() - 1.0;
    // 10% trim per side (at least the extremes when the grid is small)
    size_t trim = std::max<size_t>(ratios.size() / 10, ratios.size() > 2 ? 1 : 0);
    double sum = 0.0;
    size_t cnt = 0;
    for (size_t i = trim; i + trim < ratios.size(); ++i) {
        sum += ratios[i];
        ++cnt;
    }
    double mean = sum / double(cnt);
    out.kappa_v_x = mean * std::pow(double(n), g.p + 0.5 * g.model.dim);
    return out;
}

BoundaryReport verify_boundary_llt(const Geometry& g, const std::vector<int>& x,
                                   const std::vector<long long>& n_list, double epsilon,
                                   long long mc_samples, uint64_t seed,
                                   long long calibration_n,
                                   exact::TruncationPolicy policy, int threads) {
    BoundaryReport out;
    out.kappa_v_x = verify_interior_llt(g, x, calibration_n, 2.0, 0.1, policy).kappa_v_x;

    StepDistribution rev = reverse(g.model);
    mc::EvalFrame frame{g.transform, g.cone_decor};

    for (long long n : n_list) {
        exact::LayerEngine<double> eng(g.model, g.cone_lattice, x, policy);
        for (long long i = 0; i < n; ++i) eng.advance();

        // y = (1, m) with m the admissible lattice value nearest sqrt(n)
        const long long m0 = llround(std::sqrt(double(n)));
        std::vector<int> y;
        double exact_prob = 0.0;
        for (long long dm = 0; dm <= 8; ++dm) {
            for (int sign : {+1, -1}) {
                long long m = m0 + sign * dm;
                if (m < 1) continue;
                std::vector<int> cand = {1, int(m)};
                double mass = eng.mass_at(cand);
                if (mass > 0.0) {
                    y = cand;
                    exact_prob = mass;
                    break;
                }
                if (dm == 0) break;
            }
            if (!y.empty()) break;
        }
        if (y.empty())
            fail(ErrorCode::EmptyGrid, "no admissible near-boundary lattice point");

        auto est = mc::mc_boundary_functional(rev, g.cone_lattice, g.u, frame, y, n,
                                              epsilon, mc_samples, seed, threads);
        BoundaryPoint pt;
        pt.y = y;
        pt.n = n;
        pt.exact_prob = exact_prob;
        pt.functional_mean = est.mean;
        pt.functional_se = est.std_error;
        pt.censored_fraction = est.censored_fraction;
        pt.predicted = out.kappa_v_x * std::pow(double(n), -0.5 * g.p - 0.5 * g.model.dim) *
                       est.mean * std::exp(-g.norm2_decor(y) / (2.0 * double(n)));
        pt.ratio = pt.predicted > 0.0 ? exact_prob / pt.predicted : 0.0;
        out.points.push_back(std::move(pt));
    }
    return out;
}

HarmonicityReport verify_harmonicity_V(const Geometry& g,
                                       const std::vector<std::vector<int>>& points,
                                       long long N, exact::TruncationPolicy policy) {
    auto u_lat = [&](const std::vector<double>& z) {
        return g.u.eval(g.transform.apply(z));
    };
    auto V_of = [&](const std::vector<int>& z, double* conv) -> double {
        auto hs = exact::harmonic_V(g.model, g.cone_lattice, u_lat, z, N, policy);
        if (conv) *conv = hs.convergence;
        return hs.values.back();
    };

    HarmonicityReport out;
    for (const auto& x : points) {
        double conv = 0.0;
        double vx = V_of(x, &conv);
        out.convergence = std::max(out.convergence, conv);
        double onestep = 0.0;
        for (const auto& s : g.model.steps) {
            std::vector<int> z(x);
            for (size_t i = 0; i < z.size(); ++i) z[i] += s.v[i];
            std::vector<double> zd(z.begin(), z.end());
            if (!g.cone_lattice.contains(zd)) continue;
            double c2 = 0.0;
            onestep += s.prob * V_of(z, &c2);
            out.convergence = std::max(out.convergence, c2);
        }
        out.max_defect = std::max(out.max_defect,
                                  std::abs(vx - onestep) / std::max(std::abs(vx), 1e-300));
        ++out.points;
    }
    return out;
}

LowerBoundReport verify_uniform_lower_bound(const Geometry& g,
                                            const std::vector<std::vector<int>>& boundary_points,
                                            const std::vector<long long>& n_list,
                                            long long samples, uint64_t seed, int threads) {
    LowerBoundReport out;
    out.n_list = n_list;
    out.min_normalized = 1e300;
    for (const auto& z : boundary_points) {
        double prev = -1.0;
        for (long long n : n_list) {
            auto est = mc::mc_survival(g.model, g.cone_lattice, z, n, samples, seed, threads);
            double norm = std::pow(double(n), 0.5 * g.p) * est.mean;
            out.normalized.push_back(norm);
            out.min_normalized = std::min(out.min_normalized, norm);
            if (prev > 0.0) {
                double r = norm / prev;
                if (r < 0.5 || r > 2.0) out.ratios_stable = false;
            }
            prev = norm;
        }
    }
    return out;
}

} // namespace cw::verify

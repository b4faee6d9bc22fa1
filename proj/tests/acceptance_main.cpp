// Acceptance gate: one numbered criterion per invocation (argv[1] in 1..12).
// Each criterion prints a single PASS/FAIL line with the measured quantities
// and exits nonzero on failure. Tolerances are fixed here and nowhere else.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conewalk/brownian.hpp"
#include "conewalk/conewalk.h"
#include "conewalk/exact.hpp"
#include "conewalk/monte_carlo.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/verify.hpp"
#include "models.hpp"

using namespace cw;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) ok = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (cond ? " ok" : " FAILED");
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: rational DP equals exhaustive path enumeration, n <= 8.

using LayerMap = std::map<std::vector<int>, Rational>;

void enumerate_paths(const StepDistribution& m, const ConeSpec& cone,
                     std::vector<int>& pos, int depth, int max_depth,
                     const Rational& w, std::vector<LayerMap>& layers) {
    if (depth == max_depth) return;
    const int d = m.dim;
    std::vector<double> xd(d);
    for (const auto& s : m.steps) {
        for (int i = 0; i < d; ++i) {
            pos[i] += s.v[i];
            xd[i] = pos[i];
        }
        Rational nw = w * s.prob_exact;
        if (cone.contains(xd)) {
            layers[size_t(depth + 1)][pos] += nw;
            enumerate_paths(m, cone, pos, depth + 1, max_depth, nw, layers);
        }
        for (int i = 0; i < d; ++i) pos[i] -= s.v[i];
    }
}

bool dp_equals_enumeration(const StepDistribution& m, const ConeSpec& cone,
                           const std::vector<int>& x, int max_n, Check& ck,
                           const std::string& tag) {
    std::vector<LayerMap> layers(size_t(max_n + 1));
    layers[0][x] = Rational(1);
    std::vector<int> pos = x;
    enumerate_paths(m, cone, pos, 0, max_n, Rational(1), layers);

    exact::LayerEngine<Rational> eng(m, cone, x, exact::TruncationPolicy::full());
    for (int n = 0; n <= max_n; ++n) {
        if (n > 0) eng.advance();
        auto sparse = eng.to_sparse();
        bool same = sparse.size() == layers[size_t(n)].size();
        if (same)
            for (const auto& [y, mass] : sparse)
                if (layers[size_t(n)].at(y) != mass) { same = false; break; }
        ck.require(same, tag + " x=" + fmt(x[0]) + " n=" + std::to_string(n));
        ck.require(eng.ledger_defect() == Rational(0), tag + " ledger n=" + std::to_string(n));
        if (!same) return false;
    }
    return true;
}

int criterion1(Check& ck) {
    auto hl = testmodels::halfline_walk();
    auto hc = testmodels::halfline_cone();
    for (int x0 : {1, 2, 3})
        dp_equals_enumeration(hl, hc, {x0}, 8, ck, "half-line");
    auto nw = testmodels::nsew_walk();
    auto q = testmodels::quadrant();
    for (auto x : std::vector<std::vector<int>>{{1, 1}, {2, 1}, {1, 2}})
        dp_equals_enumeration(nw, q, x, 8, ck, "quarter-plane");
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 2: DP vs MC at 1e6 samples, 3 standard errors.

int criterion2(Check& ck) {
    auto m = testmodels::lazy_walk();
    auto cone = testmodels::quadrant();
    const std::vector<int> x = {1, 1};
    const long long n = 10;
    const long long N = 1000000;

    std::vector<std::vector<int>> ys = {{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 3}};
    exact::LayerEngine<double> eng(m, cone, x, exact::TruncationPolicy::full());
    for (long long i = 0; i < n; ++i) eng.advance();
    double exact_survival = eng.total_mass();
    std::vector<double> exact_local;
    for (const auto& y : ys) exact_local.push_back(eng.mass_at(y));

    std::vector<double> probs;
    for (const auto& s : m.steps) probs.push_back(s.prob);
    AliasTable table(probs);
    long long survived = 0;
    std::map<std::vector<int>, long long> end_hits;
    std::vector<int> pos(2);
    std::vector<double> xd(2);
    for (long long i = 0; i < N; ++i) {
        CounterRng rng(20260825, uint64_t(i));
        pos = x;
        bool alive = true;
        for (long long t = 0; t < n && alive; ++t) {
            int s = table.sample(rng);
            pos[0] += m.steps[size_t(s)].v[0];
            pos[1] += m.steps[size_t(s)].v[1];
            xd[0] = pos[0];
            xd[1] = pos[1];
            alive = cone.contains(xd);
        }
        if (alive) {
            ++survived;
            ++end_hits[pos];
        }
    }

    auto within3 = [&](double phat, double p, const std::string& what) {
        double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(N));
        ck.require(std::abs(phat - p) <= 3.0 * se,
                   what + " |" + fmt(phat) + " - " + fmt(p) + "| <= 3se=" + fmt(3.0 * se));
    };
    within3(double(survived) / double(N), exact_survival, "survival");
    for (size_t i = 0; i < ys.size(); ++i) {
        auto it = end_hits.find(ys[i]);
        double phat = it == end_hits.end() ? 0.0 : double(it->second) / double(N);
        within3(phat, exact_local[i],
                "local y=(" + std::to_string(ys[i][0]) + "," + std::to_string(ys[i][1]) + ")");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 3: survival exponent slopes.

int criterion3(Check& ck) {
    auto gh = verify::make_geometry(testmodels::halfline_walk(), testmodels::halfline_cone());
    auto ch = verify::verify_survival_exponent(gh, {1}, 256, 8192, 0.03);
    ck.require(ch.pass, "half-line slope " + fmt(ch.fit.slope) + " vs -0.5 +- 0.03");

    auto gl = verify::make_geometry(testmodels::lazy_walk(), testmodels::quadrant());
    auto cl = verify::verify_survival_exponent(gl, {1, 1}, 128, 2048, 0.08);
    ck.require(cl.pass, "lazy quarter-plane slope " + fmt(cl.fit.slope) + " vs -1.0 +- 0.08");
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 4: constrained LLT exponent slopes.

int criterion4(Check& ck) {
    auto gl = verify::make_geometry(testmodels::lazy_walk(), testmodels::quadrant());
    auto cl = verify::verify_llt_exponent(gl, {1, 1}, 128, 2048, 0.15);
    ck.require(cl.pass, "lazy excursion slope " + fmt(cl.fit.slope) + " vs -3.0 +- 0.15");

    auto gh = verify::make_geometry(testmodels::halfline_walk(), testmodels::halfline_cone());
    auto chk = verify::verify_llt_exponent(gh, {1}, 256, 8192, 0.08);
    ck.require(chk.pass, "half-line slope " + fmt(chk.fit.slope) + " vs -1.5 +- 0.08");
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 5: interior Gaussian profile flatness.

int criterion5(Check& ck) {
    auto g = verify::make_geometry(testmodels::lazy_walk(), testmodels::quadrant());
    auto r200 = verify::verify_interior_llt(g, {1, 1}, 200, 2.0, 0.1);
    auto r400 = verify::verify_interior_llt(g, {1, 1}, 400, 2.0, 0.1);
    auto r800 = verify::verify_interior_llt(g, {1, 1}, 800, 2.0, 0.1);
    ck.require(r400.ratio_spread <= 0.15,
               "spread(400)=" + fmt(r400.ratio_spread) + " <= 0.15 over " +
               std::to_string(r400.grid_size) + " points");
    ck.require(r800.ratio_spread < r200.ratio_spread,
               "spread(800)=" + fmt(r800.ratio_spread) + " < spread(200)=" +
               fmt(r200.ratio_spread));
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 6: boundary-regime ratio with calibrated constant.

int criterion6(Check& ck) {
    auto g = verify::make_geometry(testmodels::lazy_walk(), testmodels::quadrant());
    auto r = verify::verify_boundary_llt(g, {1, 1}, {100, 200, 400}, 0.1, 100000, 424242, 400);
    ck.require(r.kappa_v_x > 0.0, "calibration kappa*V(x)=" + fmt(r.kappa_v_x));
    for (const auto& pt : r.points)
        ck.require(pt.ratio >= 0.8 && pt.ratio <= 1.25,
                   "n=" + std::to_string(pt.n) + " y=(" + std::to_string(pt.y[0]) + "," +
                   std::to_string(pt.y[1]) + ") ratio=" + fmt(pt.ratio) + " in [0.8,1.25]");
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 7: Brownian reference identities.

int criterion7(Check& ck) {
    // wedge beta = pi against the half-plane image formula
    bm::WedgeKernel wpi(kPi);
    CounterRng rng(7001, 0);
    double worst_pi = 0.0;
    for (int i = 0; i < 100; ++i) {
        double r = 0.3 + 2.0 * rng.next_double();
        double th = 0.05 + (kPi - 0.1) * rng.next_double();
        double t = 0.3 + 2.0 * rng.next_double();
        double ref = std::erf(r * std::sin(th) / std::sqrt(2.0 * t));
        worst_pi = std::max(worst_pi, std::abs(wpi.survival_polar(r, th, t) - ref));
    }
    ck.require(worst_pi < 1e-8, "beta=pi vs half-plane, max |diff|=" + fmt(worst_pi));

    // wedge beta = pi/2 against the orthant product
    bm::WedgeKernel wq(kPi / 2.0);
    CounterRng rng2(7002, 0);
    double worst_q = 0.0;
    for (int i = 0; i < 100; ++i) {
        double r = 0.3 + 2.0 * rng2.next_double();
        double th = 0.05 + (kPi / 2.0 - 0.1) * rng2.next_double();
        double t = 0.3 + 2.0 * rng2.next_double();
        double ref = bm::orthant_survival({r * std::cos(th), r * std::sin(th)}, t);
        worst_q = std::max(worst_q, std::abs(wq.survival_polar(r, th, t) - ref));
    }
    ck.require(worst_q < 1e-8, "beta=pi/2 vs orthant, max |diff|=" + fmt(worst_q));

    // kernel symmetry
    bm::WedgeKernel ws(2.0 * kPi / 3.0);
    double v1 = ws.kernel_polar(1.0, 0.5, 1.7, 1.2, 0.8);
    double v2 = ws.kernel_polar(1.7, 1.2, 1.0, 0.5, 0.8);
    ck.require(std::abs(v1 - v2) < 1e-10, "kernel symmetry |diff|=" + fmt(std::abs(v1 - v2)));

    // homogeneity: k_t(x) = k_1(x/sqrt(t)), K_t(x,y) = t^{-d/2} K_1(x/st, y/st)
    bm::KernelEvaluator ev(ConeSpec(Wedge2D{2.0 * kPi / 3.0, 0.0}));
    std::vector<double> x = {1.0, 0.8}, y = {1.4, 0.5};
    double worst_h = 0.0;
    for (double t : {0.5, 2.0, 8.0, 40.0}) {
        double st = std::sqrt(t);
        std::vector<double> xs = {x[0] / st, x[1] / st}, ys = {y[0] / st, y[1] / st};
        double a = ev.survival(x, t), b = ev.survival(xs, 1.0);
        worst_h = std::max(worst_h, std::abs(a - b) / std::max(1e-300, std::abs(b)));
        double ka = ev.kernel(x, y, t), kb = ev.kernel(xs, ys, 1.0) / t;
        worst_h = std::max(worst_h, std::abs(ka - kb) / std::max(1e-300, std::abs(kb)));
    }
    ck.require(worst_h < 1e-10, "homogeneity, max rel diff=" + fmt(worst_h));

    // 1D chi fit
    ConeSpec hl(HalfSpace{{1.0}});
    auto a = bm::fit_asymptotic_constants(hl, reduite_for(hl));
    double ref = std::sqrt(2.0 / kPi);
    ck.require(std::abs(a.chi - ref) / ref < 0.005,
               "chi=" + fmt(a.chi) + " within 0.5% of sqrt(2/pi)=" + fmt(ref));
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 8: heat-kernel bound suite on the quadrant.

int criterion8(Check& ck) {
    auto r = bm::check_gaussian_bounds(ConeSpec(Orthant{2}), 400);
    ck.require(r.survival_ratio_min > 0.0 &&
               r.survival_ratio_max / r.survival_ratio_min < 10.0,
               "survival ratio max/min=" + fmt(r.survival_ratio_max / r.survival_ratio_min));
    ck.require(r.kernel_ratio_min > 0.0 &&
               r.kernel_ratio_max / r.kernel_ratio_min < 10.0,
               "kernel ratio max/min=" + fmt(r.kernel_ratio_max / r.kernel_ratio_min));
    ck.require(std::isfinite(r.fitted_c3) && r.fitted_c3 > 0.0,
               "Gaussian rate c3=" + fmt(r.fitted_c3));
    // ball-cone constant for the quadrant: volume of the unit ball at the apex
    ck.require(r.ball_constant >= kPi / 4.0 - 1e-9,
               "ball constant " + fmt(r.ball_constant) + " >= pi/4=" + fmt(kPi / 4.0));
    ck.require(r.scaling_ratio_min > 0.0 && r.scaling_ratio_max <= 1.0 + 1e-12,
               "scaling ratio range (" + fmt(r.scaling_ratio_min) + ", " +
               fmt(r.scaling_ratio_max) + "] in (0,1] at " +
               std::to_string(std::max(r.samples, 1000)) + " points");
    ck.require(r.holder_alpha > 0.0 && r.holder_constant > 0.0,
               "Holder alpha=" + fmt(r.holder_alpha));
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 9: tail inequality grid + truncated moment decay.

int criterion9(Check& ck) {
    auto m = testmodels::lazy_walk();
    int passes = 0, total = 0;
    double worst_margin = 1e300;
    for (long long n : {50, 100, 200, 400, 800}) {
        for (double xm : {1.0, 2.0, 3.0, 4.0, 6.0}) {
            for (double yt : {1.0, 2.0}) {
                double xt = xm * std::sqrt(double(n));
                auto r = mc::mc_fuk_nagaev(m, xt, yt, n, 10000, 9000 + total);
                ++total;
                if (r.lhs.mean <= r.rhs) ++passes;
                if (r.lhs.mean > 0.0)
                    worst_margin = std::min(worst_margin, r.rhs / r.lhs.mean);
            }
        }
    }
    ck.require(passes == total && total == 50,
               std::to_string(passes) + "/" + std::to_string(total) +
               " configurations satisfy lhs <= rhs (min rhs/lhs=" + fmt(worst_margin) + ")");

    auto cone = testmodels::quadrant();
    auto lo = mc::mc_max_displacement_moment(m, cone, {1, 1}, 1600, 0.2, 2.0, 400000, 5);
    auto hi = mc::mc_max_displacement_moment(m, cone, {1, 1}, 3200, 0.2, 2.0, 400000, 5);
    ck.require(hi.mean <= lo.mean,
               "truncated moment " + fmt(hi.mean) + " (n=3200) <= " + fmt(lo.mean) +
               " (n=1600)");
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 10: discrete harmonicity of V.

int criterion10(Check& ck) {
    auto gh = verify::make_geometry(testmodels::halfline_walk(), testmodels::halfline_cone());
    auto rh = verify::verify_harmonicity_V(gh, {{1}, {2}}, 64, exact::TruncationPolicy::full());
    ck.require(rh.max_defect < 1e-12, "half-line defect " + fmt(rh.max_defect) + " < 1e-12");

    auto gn = verify::make_geometry(testmodels::nsew_walk(), testmodels::quadrant());
    auto rn = verify::verify_harmonicity_V(gn, {{1, 1}, {2, 3}}, 64,
                                           exact::TruncationPolicy::full());
    ck.require(rn.max_defect < 1e-12, "quarter-plane defect " + fmt(rn.max_defect) + " < 1e-12");

    auto gl = verify::make_geometry(testmodels::lazy_walk(), testmodels::quadrant());
    auto rl = verify::verify_harmonicity_V(gl, {{3, 3}}, 512);
    ck.require(rl.max_defect < 0.02, "lazy defect " + fmt(rl.max_defect) + " < 0.02 at N=512");
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 11: stopping-time tail decay.

int criterion11(Check& ck) {
    auto m = testmodels::lazy_walk();
    auto cone = testmodels::quadrant();
    auto g = verify::make_geometry(m, cone);
    mc::EvalFrame frame{g.transform, g.cone_decor};
    auto t100 = mc::mc_stopping_time_tail(m, cone, frame, {1, 1}, 100, 0.2, 200000, 1111);
    auto t400 = mc::mc_stopping_time_tail(m, cone, frame, {1, 1}, 400, 0.2, 200000, 1111);
    bool ok = t400.frequency < t100.frequency ||
              (t100.frequency < 1e-4 && t400.frequency < 1e-4);
    ck.require(ok, "freq(400)=" + fmt(t400.frequency) + " vs freq(100)=" + fmt(t100.frequency));
    return 0;
}

// ---------------------------------------------------------------------------
// Criterion 12: byte-identical reports across 1/4/16 threads.

int criterion12(Check& ck) {
    const char* model_json = R"({"dim":2,"steps":[
        {"v":[1,0],"p":"1/5"},{"v":[-1,0],"p":"1/5"},
        {"v":[0,1],"p":"1/5"},{"v":[0,-1],"p":"1/5"},
        {"v":[0,0],"p":"1/5"}]})";
    const char* cone_json = R"({"variant":"orthant","dim":2})";
    cw_model* m = nullptr;
    cw_cone* c = nullptr;
    if (cw_model_parse(model_json, &m) != CW_OK || cw_cone_parse(cone_json, &c) != CW_OK) {
        ck.require(false, "fixture parse");
        return 1;
    }

    auto run = [&](bool is_verify, json params, int threads) -> std::string {
        params["threads"] = threads;
        char* rep = nullptr;
        cw_status st = is_verify
            ? cw_verify_run(m, c, params.dump().c_str(), &rep)
            : cw_mc_run(m, c, params.dump().c_str(), &rep);
        if (st != CW_OK) return std::string("<error: ") + cw_last_error() + ">";
        std::string out(rep);
        cw_string_free(rep);
        return out;
    };
    auto check_op = [&](bool is_verify, const json& params) {
        std::string r1 = run(is_verify, params, 1);
        std::string r4 = run(is_verify, params, 4);
        std::string r16 = run(is_verify, params, 16);
        bool same = r1 == r4 && r1 == r16 && r1.rfind("<error", 0) != 0;
        ck.require(same, std::string(is_verify ? "verify " : "mc ") +
                   params.at("op").get<std::string>() + " byte-identical across 1/4/16 threads");
    };

    check_op(false, {{"op", "survival"}, {"x", {1, 1}}, {"n", 64},
                     {"samples", 40000}, {"seed", 12}});
    check_op(false, {{"op", "boundary-functional"}, {"y", {1, 8}}, {"n", 64},
                     {"epsilon", 0.2}, {"samples", 40000}, {"seed", 12}});
    check_op(false, {{"op", "stopping-tail"}, {"x", {1, 1}}, {"n", 64},
                     {"epsilon", 0.2}, {"samples", 40000}, {"seed", 12}});
    check_op(false, {{"op", "fuk-nagaev"}, {"x_threshold", 30.0}, {"y_threshold", 1.0},
                     {"n", 100}, {"samples", 40000}, {"seed", 12}});
    check_op(false, {{"op", "max-moment"}, {"x", {1, 1}}, {"n", 100}, {"epsilon", 0.2},
                     {"alpha", 2.0}, {"samples", 40000}, {"seed", 12}});
    check_op(true, {{"op", "survival"}, {"x", {1, 1}}, {"window", {32, 256}},
                    {"tolerance", 0.2}});
    check_op(true, {{"op", "lower-bound"}, {"points", {{1, 10}}}, {"n_list", {64, 128}},
                    {"samples", 20000}, {"seed", 12}});
    check_op(true, {{"op", "boundary"}, {"x", {1, 1}}, {"n_list", {64}}, {"epsilon", 0.1},
                    {"samples", 20000}, {"seed", 12}, {"calibration_n", 150}});

    cw_model_free(m);
    cw_cone_free(c);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..12>\n");
        return 2;
    }
    int which = std::atoi(argv[1]);
    Check ck;
    try {
        switch (which) {
            case 1: criterion1(ck); break;
            case 2: criterion2(ck); break;
            case 3: criterion3(ck); break;
            case 4: criterion4(ck); break;
            case 5: criterion5(ck); break;
            case 6: criterion6(ck); break;
            case 7: criterion7(ck); break;
            case 8: criterion8(ck); break;
            case 9: criterion9(ck); break;
            case 10: criterion10(ck); break;
            case 11: criterion11(ck); break;
            case 12: criterion12(ck); break;
            default:
                std::fprintf(stderr, "unknown criterion %d\n", which);
                return 2;
        }
    } catch (const std::exception& e) {
        std::printf("criterion %d: FAIL (exception: %s)\n", which, e.what());
        return 1;
    }
    std::printf("criterion %d: %s (%s)\n", which, ck.ok ? "PASS" : "FAIL", ck.detail.c_str());
    return ck.ok ? 0 : 1;
}

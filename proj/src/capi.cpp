#include "conewalk/conewalk.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "conewalk/brownian.hpp"
#include "conewalk/cone.hpp"
#include "conewalk/exact.hpp"
#include "conewalk/monte_carlo.hpp"
#include "conewalk/reduite.hpp"
#include "conewalk/verify.hpp"
#include "conewalk/walk_model.hpp"

using nlohmann::json;

struct cw_model {
    cw::StepDistribution m;
};

struct cw_cone {
    cw::ConeSpec c;
};

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kSchema = "conewalk-report/1";

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

cw_status map_code(cw::ErrorCode c) {
    switch (c) {
        case cw::ErrorCode::Ok: return CW_OK;
        case cw::ErrorCode::ConfigError: return CW_ERR_CONFIG;
        case cw::ErrorCode::NonZeroDrift: return CW_ERR_NON_ZERO_DRIFT;
        case cw::ErrorCode::DegenerateSupport: return CW_ERR_DEGENERATE_SUPPORT;
        case cw::ErrorCode::SingularCovariance: return CW_ERR_SINGULAR_COVARIANCE;
        case cw::ErrorCode::DimensionMismatch: return CW_ERR_DIMENSION_MISMATCH;
        case cw::ErrorCode::PointOutsideCone: return CW_ERR_POINT_OUTSIDE_CONE;
        case cw::ErrorCode::StartOutsideCone: return CW_ERR_START_OUTSIDE_CONE;
        case cw::ErrorCode::UnsupportedTransform: return CW_ERR_UNSUPPORTED_TRANSFORM;
        case cw::ErrorCode::NoClosedForm: return CW_ERR_NO_CLOSED_FORM;
        case cw::ErrorCode::SeriesNotConverged: return CW_ERR_SERIES_NOT_CONVERGED;
        case cw::ErrorCode::FitDiverged: return CW_ERR_FIT_DIVERGED;
        case cw::ErrorCode::NonPositiveValue: return CW_ERR_NON_POSITIVE_VALUE;
        case cw::ErrorCode::EmptyGrid: return CW_ERR_EMPTY_GRID;
        case cw::ErrorCode::IoError: return CW_ERR_IO;
        case cw::ErrorCode::InternalError: return CW_ERR_INTERNAL;
    }
    return CW_ERR_INTERNAL;
}

template <class F>
cw_status guarded(F&& f) {
    try {
        f();
        return CW_OK;
    } catch (const cw::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const json::exception& e) {
        g_last_error = e.what();
        return CW_ERR_CONFIG;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CW_ERR_INTERNAL;
    }
}

std::vector<int> get_point(const json& j, const char* key) {
    if (!j.contains(key))
        cw::fail(cw::ErrorCode::ConfigError, std::string("missing parameter: ") + key);
    return j.at(key).get<std::vector<int>>();
}

cw::exact::TruncationPolicy get_policy(const json& j) {
    cw::exact::TruncationPolicy p;
    if (!j.contains("truncation")) return p;
    const json& t = j.at("truncation");
    std::string mode = t.value("mode", "auto");
    if (mode == "full") {
        p = cw::exact::TruncationPolicy::full();
    } else if (mode == "radius") {
        p = cw::exact::TruncationPolicy::fixed(t.at("radius").get<long long>());
    } else if (mode == "auto") {
        p.c = t.value("c", 4.0);
    } else {
        cw::fail(cw::ErrorCode::ConfigError, "unknown truncation mode: " + mode);
    }
    return p;
}

json report_head(const std::string& family, const json& params) {
    json r;
    r["schema"] = kSchema;
    r["version"] = kVersion;
    r["family"] = family;
    r["params"] = params;
    return r;
}

json estimate_json(const cw::mc::MCEstimate& e) {
    return {{"mean", e.mean},
            {"std_error", e.std_error},
            {"samples", e.samples},
            {"seed", e.seed},
            {"substreams", e.substream_count},
            {"censored_fraction", e.censored_fraction}};
}

json fit_json(const cw::FitResult& f) {
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"r_squared", f.r_squared},
            {"window", {f.window_min, f.window_max}},
            {"residual_max", f.residual_max},
            {"points", f.points}};
}

json exponent_json(const cw::verify::ExponentCheck& c) {
    return {{"fit", fit_json(c.fit)},
            {"expected_slope", c.expected_slope},
            {"tolerance", c.tolerance},
            {"period", c.period},
            {"residue", c.residue},
            {"pass", c.pass}};
}

void emit(char** out, const json& j) {
    *out = dup_string(j.dump(2));
    if (!*out) cw::fail(cw::ErrorCode::InternalError, "allocation failed");
}

std::string get_op(const json& params) {
    if (!params.contains("op"))
        cw::fail(cw::ErrorCode::ConfigError, "missing \"op\" key");
    return params.at("op").get<std::string>();
}

} // namespace

extern "C" {

const char* cw_version(void) { return kVersion; }

const char* cw_last_error(void) { return g_last_error.c_str(); }

void cw_string_free(char* s) { std::free(s); }

cw_status cw_model_parse(const char* json_text, cw_model** out) {
    return guarded([&] {
        auto m = cw::model_from_json(json_text ? json_text : "");
        *out = new cw_model{std::move(m)};
    });
}

cw_status cw_model_load(const char* path, cw_model** out) {
    return guarded([&] {
        auto m = cw::model_from_file(path ? path : "");
        *out = new cw_model{std::move(m)};
    });
}

void cw_model_free(cw_model* m) { delete m; }

cw_status cw_model_report_json(const cw_model* m, const cw_cone* cone_or_null,
                               char** json_out) {
    return guarded([&] {
        cw::ModelReport r = cone_or_null ? cw::validate_model(m->m, cone_or_null->c)
                                         : cw::validate_model(m->m);
        json j = report_head("model", json::object());
        j["mean"] = r.mean;
        j["covariance"] = r.covariance;
        j["period"] = r.period;
        j["sublattice_basis"] = r.sublattice_basis;
        j["reachable_lattice_index"] = r.reachable_lattice_index;
        j["support_lattice_index"] = r.support_lattice_index;
        j["aperiodic"] = r.aperiodic;
        j["moments_finite"] = r.moments_finite;
        j["reverse_reachability_hint"] = r.reverse_reachability_hint;
        emit(json_out, j);
    });
}

cw_status cw_model_decorrelate_json(const cw_model* m, char** json_out) {
    return guarded([&] {
        auto [steps, t] = cw::decorrelate(m->m);
        json j = report_head("model", json::object());
        j["transform"] = t.matrix;
        j["inverse"] = t.inverse;
        json arr = json::array();
        for (const auto& [v, p] : steps.steps) arr.push_back({{"v", v}, {"prob", p}});
        j["steps"] = arr;
        emit(json_out, j);
    });
}

cw_status cw_cone_parse(const char* json_text, cw_cone** out) {
    return guarded([&] {
        auto c = cw::cone_from_json(json_text ? json_text : "");
        *out = new cw_cone{std::move(c)};
    });
}

cw_status cw_cone_load(const char* path, cw_cone** out) {
    return guarded([&] {
        auto c = cw::cone_from_file(path ? path : "");
        *out = new cw_cone{std::move(c)};
    });
}

void cw_cone_free(cw_cone* c) { delete c; }

cw_status cw_cone_info_json(const cw_cone* c, char** json_out) {
    return guarded([&] {
        json j = report_head("cone", json::object());
        j["variant"] = c->c.variant_name();
        j["dim"] = c->c.dim();
        j["spec"] = json::parse(cw::cone_to_json(c->c));
        try {
            cw::ReduiteFn u = cw::reduite_for(c->c);
            j["p"] = u.p();
        } catch (const cw::Error&) {
            j["p"] = nullptr;
        }
        emit(json_out, j);
    });
}

cw_status cw_reduite_eval(const cw_cone* c, const double* x, int dim, double* out) {
    return guarded([&] {
        if (dim != c->c.dim())
            cw::fail(cw::ErrorCode::DimensionMismatch, "point dimension mismatch");
        cw::ReduiteFn u = cw::reduite_for(c->c);
        *out = u.eval(std::vector<double>(x, x + dim));
    });
}

cw_status cw_reduite_check_json(const cw_cone* c, int samples, double h, char** json_out) {
    return guarded([&] {
        cw::ReduiteFn u = cw::reduite_for(c->c);
        auto chk = cw::check_harmonic(u, samples, h);
        json j = report_head("reduite", {{"samples", samples}, {"h", h}});
        j["max_residual"] = chk.max_residual;
        j["points_checked"] = chk.points_checked;
        j["p"] = u.p();
        emit(json_out, j);
    });
}

cw_status cw_exact_run(const cw_model* m, const cw_cone* c, const char* params_json,
                       char** report_json) {
    return guarded([&] {
        json params = json::parse(params_json ? params_json : "{}");
        const std::string op = get_op(params);
        auto policy = get_policy(params);
        json j = report_head("exact", params);

        if (op == "survival") {
            auto x = get_point(params, "x");
            long long n = params.at("n").get<long long>();
            auto s = cw::exact::survival(m->m, c->c, x, n, policy);
            j["values"] = s.values;
            j["truncation_loss"] = s.trunc_loss;
        } else if (op == "local") {
            auto x = get_point(params, "x");
            auto y = get_point(params, "y");
            long long n = params.at("n").get<long long>();
            auto p = cw::exact::local_probability(m->m, c->c, x, y, n, policy);
            j["value"] = p.value;
            j["truncation_loss"] = p.truncation_loss;
        } else if (op == "green") {
            auto x = get_point(params, "x");
            auto y = get_point(params, "y");
            long long n = params.at("n").get<long long>();
            auto g = cw::exact::green_partial(m->m, c->c, x, y, n, policy);
            j["partial_sum"] = g.partial_sum;
            j["tail_estimate"] = g.tail_estimate;
            j["truncation_loss"] = g.truncation_loss;
        } else if (op == "harmonic-v") {
            auto x = get_point(params, "x");
            long long n = params.at("n").get<long long>();
            auto g = cw::verify::make_geometry(m->m, c->c);
            auto u = [&g](const std::vector<double>& z) {
                return g.u.eval(g.transform.apply(z));
            };
            auto h = cw::exact::harmonic_V(m->m, c->c, u, x, n, policy);
            j["values"] = h.values;
            j["convergence"] = h.convergence;
        } else if (op == "count") {
            auto x = get_point(params, "x");
            auto y = get_point(params, "y");
            long long n = params.at("n").get<long long>();
            std::vector<std::vector<int>> stepset;
            for (const auto& s : m->m.steps) stepset.push_back(s.v);
            auto count = cw::exact::excursion_count(stepset, c->c, x, y, n);
            j["count"] = count.str();
        } else {
            cw::fail(cw::ErrorCode::ConfigError, "unknown exact op: " + op);
        }
        emit(report_json, j);
    });
}

cw_status cw_mc_run(const cw_model* m, const cw_cone* c, const char* params_json,
                    char** report_json) {
    return guarded([&] {
        json params = json::parse(params_json ? params_json : "{}");
        const std::string op = get_op(params);
        long long samples = params.value("samples", 10000LL);
        uint64_t seed = params.value("seed", uint64_t(1));
        int threads = params.value("threads", 1);
        // thread count affects wall time only; keep it out of the report so
        // reports are byte-identical for any schedule
        json embedded = params;
        embedded.erase("threads");
        json j = report_head("mc", embedded);

        if (op == "survival") {
            auto x = get_point(params, "x");
            long long n = params.at("n").get<long long>();
            j["estimate"] = estimate_json(
                cw::mc::mc_survival(m->m, c->c, x, n, samples, seed, threads));
        } else if (op == "boundary-functional") {
            auto y = get_point(params, "y");
            long long n = params.at("n").get<long long>();
            double eps = params.at("epsilon").get<double>();
            auto g = cw::verify::make_geometry(m->m, c->c);
            cw::mc::EvalFrame frame{g.transform, g.cone_decor};
            auto rev = cw::reverse(m->m);
            j["estimate"] = estimate_json(cw::mc::mc_boundary_functional(
                rev, c->c, g.u, frame, y, n, eps, samples, seed, threads));
        } else if (op == "stopping-tail") {
            auto x = get_point(params, "x");
            long long n = params.at("n").get<long long>();
            double eps = params.at("epsilon").get<double>();
            auto g = cw::verify::make_geometry(m->m, c->c);
            cw::mc::EvalFrame frame{g.transform, g.cone_decor};
            auto t = cw::mc::mc_stopping_time_tail(m->m, c->c, frame, x, n, eps,
                                                   samples, seed, threads);
            j["frequency"] = t.frequency;
            j["ci_low"] = t.ci_low;
            j["ci_high"] = t.ci_high;
            j["hits"] = t.hits;
            j["samples"] = t.samples;
            j["seed"] = t.seed;
        } else if (op == "fuk-nagaev") {
            double xt = params.at("x_threshold").get<double>();
            double yt = params.at("y_threshold").get<double>();
            long long n = params.at("n").get<long long>();
            auto r = cw::mc::mc_fuk_nagaev(m->m, xt, yt, n, samples, seed, threads);
            j["lhs"] = estimate_json(r.lhs);
            j["rhs"] = r.rhs;
            j["pass"] = r.lhs.mean <= r.rhs;
        } else if (op == "max-moment") {
            auto x = get_point(params, "x");
            long long n = params.at("n").get<long long>();
            double eps = params.at("epsilon").get<double>();
            double alpha = params.value("alpha", 2.0);
            j["estimate"] = estimate_json(cw::mc::mc_max_displacement_moment(
                m->m, c->c, x, n, eps, alpha, samples, seed, threads));
        } else {
            cw::fail(cw::ErrorCode::ConfigError, "unknown mc op: " + op);
        }
        emit(report_json, j);
    });
}

cw_status cw_bm_run(const cw_cone* c, const char* params_json, char** report_json) {
    return guarded([&] {
        json params = json::parse(params_json ? params_json : "{}");
        const std::string op = get_op(params);
        json j = report_head("bm", params);
        int terms = params.value("terms", 200);
        double tol = params.value("tolerance", 1e-12);

        if (op == "kernel") {
            auto x = params.at("x").get<std::vector<double>>();
            auto y = params.at("y").get<std::vector<double>>();
            double t = params.at("t").get<double>();
            cw::bm::KernelEvaluator ev(c->c, terms, tol);
            j["value"] = ev.kernel(x, y, t);
        } else if (op == "survival") {
            auto x = params.at("x").get<std::vector<double>>();
            double t = params.at("t").get<double>();
            cw::bm::KernelEvaluator ev(c->c, terms, tol);
            j["value"] = ev.survival(x, t);
        } else if (op == "fit-constants") {
            auto u = cw::reduite_for(c->c);
            auto a = cw::bm::fit_asymptotic_constants(c->c, u);
            j["chi"] = a.chi;
            j["chi0"] = a.chi0;
            j["t_window"] = {a.t_min, a.t_max};
            j["fit_residual"] = a.fit_residual;
        } else if (op == "check-bounds") {
            int samples = params.value("samples", 200);
            uint64_t seed = params.value("seed", uint64_t(987));
            auto r = cw::bm::check_gaussian_bounds(c->c, samples, seed);
            j["survival_ratio"] = {r.survival_ratio_min, r.survival_ratio_max};
            j["kernel_ratio"] = {r.kernel_ratio_min, r.kernel_ratio_max};
            j["fitted_c3"] = r.fitted_c3;
            j["ball_constant"] = r.ball_constant;
            j["scaling_ratio"] = {r.scaling_ratio_min, r.scaling_ratio_max};
            j["holder_alpha"] = r.holder_alpha;
            j["holder_constant"] = r.holder_constant;
            j["samples"] = r.samples;
        } else {
            cw::fail(cw::ErrorCode::ConfigError, "unknown bm op: " + op);
        }
        emit(report_json, j);
    });
}

cw_status cw_verify_run(const cw_model* m, const cw_cone* c, const char* params_json,
                        char** report_json) {
    return guarded([&] {
        json params = json::parse(params_json ? params_json : "{}");
        const std::string op = get_op(params);
        auto policy = get_policy(params);
        auto g = cw::verify::make_geometry(m->m, c->c);
        json embedded = params;
        embedded.erase("threads");
        json j = report_head("verify", embedded);
        j["p"] = g.p;
        j["period"] = g.period;

        if (op == "survival") {
            auto x = get_point(params, "x");
            auto w = params.at("window").get<std::vector<long long>>();
            double tol = params.at("tolerance").get<double>();
            j["check"] = exponent_json(
                cw::verify::verify_survival_exponent(g, x, w.at(0), w.at(1), tol, policy));
            j["pass"] = j["check"]["pass"];
        } else if (op == "llt-exponent") {
            auto x = get_point(params, "x");
            auto w = params.at("window").get<std::vector<long long>>();
            double tol = params.at("tolerance").get<double>();
            bool unconstrained = params.value("unconstrained", false);
            j["check"] = exponent_json(cw::verify::verify_llt_exponent(
                g, x, w.at(0), w.at(1), tol, unconstrained, policy));
            j["pass"] = j["check"]["pass"];
        } else if (op == "interior") {
            auto x = get_point(params, "x");
            long long n = params.at("n").get<long long>();
            double A = params.value("A", 2.0);
            double eps = params.value("epsilon", 0.1);
            auto r = cw::verify::verify_interior_llt(g, x, n, A, eps, policy);
            j["kappa_v_x"] = r.kappa_v_x;
            j["ratio_spread"] = r.ratio_spread;
            j["grid_size"] = r.grid_size;
            j["period_class"] = r.period_class;
            j["n"] = r.n;
        } else if (op == "boundary") {
            auto x = get_point(params, "x");
            auto ns = params.at("n_list").get<std::vector<long long>>();
            double eps = params.value("epsilon", 0.1);
            long long samples = params.value("samples", 100000LL);
            uint64_t seed = params.value("seed", uint64_t(1));
            long long cal = params.value("calibration_n", 400LL);
            int threads = params.value("threads", 1);
            auto r = cw::verify::verify_boundary_llt(g, x, ns, eps, samples, seed, cal,
                                                     policy, threads);
            j["kappa_v_x"] = r.kappa_v_x;
            json pts = json::array();
            for (const auto& pt : r.points)
                pts.push_back({{"y", pt.y},
                               {"n", pt.n},
                               {"exact_prob", pt.exact_prob},
                               {"predicted", pt.predicted},
                               {"ratio", pt.ratio},
                               {"functional_mean", pt.functional_mean},
                               {"functional_se", pt.functional_se},
                               {"censored_fraction", pt.censored_fraction}});
            j["points"] = pts;
        } else if (op == "harmonic-v") {
            auto pts = params.at("points").get<std::vector<std::vector<int>>>();
            long long N = params.at("N").get<long long>();
            auto r = cw::verify::verify_harmonicity_V(g, pts, N, policy);
            j["max_defect"] = r.max_defect;
            j["convergence"] = r.convergence;
            j["points"] = r.points;
        } else if (op == "lower-bound") {
            auto pts = params.at("points").get<std::vector<std::vector<int>>>();
            auto ns = params.at("n_list").get<std::vector<long long>>();
            long long samples = params.value("samples", 10000LL);
            uint64_t seed = params.value("seed", uint64_t(1));
            int threads = params.value("threads", 1);
            auto r = cw::verify::verify_uniform_lower_bound(g, pts, ns, samples, seed,
                                                            threads);
            j["min_normalized"] = r.min_normalized;
            j["normalized"] = r.normalized;
            j["n_list"] = r.n_list;
            j["ratios_stable"] = r.ratios_stable;
        } else {
            cw::fail(cw::ErrorCode::ConfigError, "unknown verify op: " + op);
        }
        emit(report_json, j);
    });
}

} // extern "C"

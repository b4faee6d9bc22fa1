// cone-walker: CLI front end over the conewalk C API.
//
// Exit codes: 0 success, 1 usage/config/IO error, 2 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "conewalk/conewalk.h"

using nlohmann::json;

namespace {

struct ModelHandle {
    cw_model* m = nullptr;
    ~ModelHandle() { cw_model_free(m); }
};

struct ConeHandle {
    cw_cone* c = nullptr;
    ~ConeHandle() { cw_cone_free(c); }
};

[[noreturn]] void die(const std::string& msg, int code = 1) {
    std::cerr << "cone-walker: " << msg << "\n";
    std::exit(code);
}

void check(cw_status st, const std::string& what) {
    if (st != CW_OK)
        die(what + ": " + cw_last_error());
}

std::vector<int> parse_point(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) die("empty point: " + s);
    return out;
}

std::vector<double> parse_real_point(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) die("empty point: " + s);
    return out;
}

int default_threads() {
    if (const char* env = std::getenv("CONE_WALKER_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

std::string run_json(cw_status (*fn)(const cw_model*, const cw_cone*, const char*, char**),
                     const cw_model* m, const cw_cone* c, const json& params) {
    char* out = nullptr;
    check(fn(m, c, params.dump().c_str(), &out), "command failed");
    std::string s(out);
    cw_string_free(out);
    return s;
}

struct Output {
    std::string path;    // empty = stdout
    std::string format;  // "json" or "csv"

    void write(const std::string& text, const std::string& summary) const {
        if (path.empty()) {
            std::cout << text << "\n";
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) die("cannot write " + path);
            f << text << "\n";
            std::cout << summary << "\n";
        }
    }
};

// series reports -> "n,value[,truncation_loss]" rows
std::string series_csv(const json& report, const std::string& values_key,
                       const std::string& loss_key) {
    std::ostringstream os;
    os.precision(17);
    const auto& vals = report.at(values_key);
    const json* loss = report.contains(loss_key) ? &report.at(loss_key) : nullptr;
    os << "n," << values_key;
    if (loss) os << "," << loss_key;
    os << "\n";
    for (size_t i = 0; i < vals.size(); ++i) {
        os << i << "," << vals[i].get<double>();
        if (loss) os << "," << (*loss)[i].get<double>();
        os << "\n";
    }
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice random walks in cones: exact DP, Monte Carlo, Brownian "
                 "reference values and asymptotics checks"};
    app.require_subcommand(1);

    std::string model_path, cone_path, out_path, format = "json";
    std::string x_str, y_str, points_str, window_str, nlist_str;
    long long n = 0, samples = 10000, calibration_n = 400;
    double epsilon = 0.1, A = 2.0, tval = 1.0, tolerance = 0.05, h = 1e-3, alpha = 2.0;
    double x_threshold = 0.0, y_threshold = 0.0;
    unsigned long long seed = 1;
    int threads = default_threads(), terms = 200, check_samples = 200;
    bool unconstrained = false;
    std::string trunc_mode = "auto";
    double trunc_c = 4.0;
    long long trunc_radius = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_model) {
        if (needs_model) cmd->add_option("--model", model_path, "step-law JSON file")->required();
        cmd->add_option("--cone", cone_path, "cone JSON file")->required();
        cmd->add_option("--out", out_path, "report file (default: stdout)");
        cmd->add_option("--format", format, "json|csv");
    };
    auto add_trunc = [&](CLI::App* cmd) {
        cmd->add_option("--trunc-mode", trunc_mode, "auto|full|radius");
        cmd->add_option("--trunc-c", trunc_c, "auto window constant");
        cmd->add_option("--trunc-radius", trunc_radius, "fixed window radius");
    };

    // model
    auto* model_cmd = app.add_subcommand("model", "step-law inspection");
    auto* model_validate = model_cmd->add_subcommand("validate", "drift/covariance/period report");
    model_validate->add_option("--model", model_path)->required();
    model_validate->add_option("--cone", cone_path);
    model_validate->add_option("--out", out_path);
    auto* model_decor = model_cmd->add_subcommand("decorrelate", "identity-covariance transform");
    model_decor->add_option("--model", model_path)->required();
    model_decor->add_option("--out", out_path);

    // cone
    auto* cone_cmd = app.add_subcommand("cone", "cone inspection");
    auto* cone_info = cone_cmd->add_subcommand("info", "variant, dimension, exponent p");
    cone_info->add_option("--cone", cone_path)->required();
    cone_info->add_option("--out", out_path);

    // reduite
    auto* red_cmd = app.add_subcommand("reduite", "harmonic function of the cone");
    auto* red_eval = red_cmd->add_subcommand("eval", "evaluate u at a point");
    red_eval->add_option("--cone", cone_path)->required();
    red_eval->add_option("--x", x_str, "comma-separated coordinates")->required();
    auto* red_check = red_cmd->add_subcommand("check", "finite-difference harmonicity residual");
    red_check->add_option("--cone", cone_path)->required();
    red_check->add_option("--samples", check_samples);
    red_check->add_option("--step-size", h);
    red_check->add_option("--out", out_path);

    // exact
    auto* exact_cmd = app.add_subcommand("exact", "dynamic-programming engine");
    CLI::App* exact_sub[5];
    const char* exact_ops[5] = {"survival", "local", "green", "harmonic-v", "count"};
    for (int i = 0; i < 5; ++i) {
        auto* s = exact_cmd->add_subcommand(exact_ops[i]);
        add_common(s, true);
        s->add_option("--start,--x", x_str)->required();
        if (i == 1 || i == 2 || i == 4) s->add_option("--y", y_str)->required();
        s->add_option("--n", n)->required();
        add_trunc(s);
        exact_sub[i] = s;
    }

    // mc
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimators");
    CLI::App* mc_sub[5];
    const char* mc_ops[5] = {"survival", "boundary-functional", "stopping-tail",
                             "fuk-nagaev", "max-moment"};
    for (int i = 0; i < 5; ++i) {
        auto* s = mc_cmd->add_subcommand(mc_ops[i]);
        add_common(s, true);
        if (i == 1) s->add_option("--y", y_str)->required();
        else if (i != 3) s->add_option("--start,--x", x_str)->required();
        s->add_option("--n", n)->required();
        s->add_option("--samples", samples);
        s->add_option("--seed", seed);
        s->add_option("--threads", threads);
        if (i == 1 || i == 2 || i == 4) s->add_option("--epsilon", epsilon);
        if (i == 3) {
            s->add_option("--x-threshold", x_threshold)->required();
            s->add_option("--y-threshold", y_threshold)->required();
        }
        if (i == 4) s->add_option("--alpha", alpha);
        mc_sub[i] = s;
    }

    // bm
    auto* bm_cmd = app.add_subcommand("bm", "Brownian heat kernel reference");
    CLI::App* bm_sub[4];
    const char* bm_ops[4] = {"kernel", "survival", "fit-constants", "check-bounds"};
    for (int i = 0; i < 4; ++i) {
        auto* s = bm_cmd->add_subcommand(bm_ops[i]);
        s->add_option("--cone", cone_path)->required();
        s->add_option("--out", out_path);
        s->add_option("--format", format);
        if (i <= 1) {
            s->add_option("--x", x_str)->required();
            s->add_option("--t", tval)->required();
            s->add_option("--terms", terms);
        }
        if (i == 0) s->add_option("--y", y_str)->required();
        if (i == 3) {
            s->add_option("--samples", check_samples);
            s->add_option("--seed", seed);
        }
        bm_sub[i] = s;
    }

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "asymptotics checks");
    CLI::App* verify_sub[6];
    const char* verify_ops[6] = {"survival", "llt-exponent", "interior",
                                 "boundary", "harmonic-v", "lower-bound"};
    for (int i = 0; i < 6; ++i) {
        auto* s = verify_cmd->add_subcommand(verify_ops[i]);
        add_common(s, true);
        add_trunc(s);
        if (i <= 3) s->add_option("--start,--x", x_str)->required();
        if (i <= 1) {
            s->add_option("--window", window_str, "min,max")->required();
            s->add_option("--tolerance", tolerance);
        }
        if (i == 1) s->add_flag("--unconstrained", unconstrained);
        if (i == 2) {
            s->add_option("--n", n)->required();
            s->add_option("--A", A);
            s->add_option("--epsilon", epsilon);
        }
        if (i == 3) {
            s->add_option("--n-grid", nlist_str, "comma-separated n values")->required();
            s->add_option("--epsilon", epsilon);
            s->add_option("--samples", samples);
            s->add_option("--seed", seed);
            s->add_option("--threads", threads);
            s->add_option("--calibration-n", calibration_n);
        }
        if (i == 4) {
            s->add_option("--points", points_str, "semicolon-separated points")->required();
            s->add_option("--n", n)->required();
        }
        if (i == 5) {
            s->add_option("--points", points_str)->required();
            s->add_option("--n-grid", nlist_str)->required();
            s->add_option("--samples", samples);
            s->add_option("--seed", seed);
            s->add_option("--threads", threads);
        }
        verify_sub[i] = s;
    }

    CLI11_PARSE(app, argc, argv);

    Output out{out_path, format};

    ModelHandle model;
    ConeHandle cone;
    if (!model_path.empty())
        check(cw_model_load(model_path.c_str(), &model.m), "loading " + model_path);
    if (!cone_path.empty())
        check(cw_cone_load(cone_path.c_str(), &cone.c), "loading " + cone_path);

    auto trunc_json = [&]() {
        json t{{"mode", trunc_mode}};
        if (trunc_mode == "auto") t["c"] = trunc_c;
        if (trunc_mode == "radius") t["radius"] = trunc_radius;
        return t;
    };
    auto parse_points_list = [&]() {
        std::vector<std::vector<int>> pts;
        std::stringstream ss(points_str);
        std::string tok;
        while (std::getline(ss, tok, ';')) pts.push_back(parse_point(tok));
        return pts;
    };
    auto parse_ll_list = [&](const std::string& s) {
        std::vector<long long> v;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) v.push_back(std::stoll(tok));
        return v;
    };

    if (*model_validate) {
        char* rep = nullptr;
        check(cw_model_report_json(model.m, cone.c, &rep), "model validation");
        out.write(rep, "model: ok");
        cw_string_free(rep);
        return 0;
    }
    if (*model_decor) {
        char* rep = nullptr;
        check(cw_model_decorrelate_json(model.m, &rep), "decorrelation");
        out.write(rep, "decorrelate: ok");
        cw_string_free(rep);
        return 0;
    }
    if (*cone_info) {
        char* rep = nullptr;
        check(cw_cone_info_json(cone.c, &rep), "cone info");
        out.write(rep, "cone: ok");
        cw_string_free(rep);
        return 0;
    }
    if (*red_eval) {
        auto x = parse_real_point(x_str);
        double v = 0.0;
        check(cw_reduite_eval(cone.c, x.data(), int(x.size()), &v), "reduite eval");
        std::cout.precision(17);
        std::cout << v << "\n";
        return 0;
    }
    if (*red_check) {
        char* rep = nullptr;
        check(cw_reduite_check_json(cone.c, check_samples, h, &rep), "reduite check");
        out.write(rep, "reduite: ok");
        cw_string_free(rep);
        return 0;
    }

    for (int i = 0; i < 5; ++i) {
        if (!*exact_sub[i]) continue;
        json params{{"op", exact_ops[i]}, {"n", n}, {"truncation", trunc_json()}};
        params["x"] = parse_point(x_str);
        if (!y_str.empty()) params["y"] = parse_point(y_str);
        std::string rep = run_json(cw_exact_run, model.m, cone.c, params);
        json j = json::parse(rep);
        if (format == "csv" && i == 0)
            out.write(series_csv(j, "values", "truncation_loss"), "exact survival: ok");
        else if (format == "csv" && i == 3)
            out.write(series_csv(j, "values", ""), "exact harmonic-v: ok");
        else
            out.write(rep, std::string("exact ") + exact_ops[i] + ": ok");
        return 0;
    }

    for (int i = 0; i < 5; ++i) {
        if (!*mc_sub[i]) continue;
        json params{{"op", mc_ops[i]},  {"n", n},          {"samples", samples},
                    {"seed", seed},     {"threads", threads}};
        if (i == 1) params["y"] = parse_point(y_str);
        else if (i != 3) params["x"] = parse_point(x_str);
        if (i == 1 || i == 2 || i == 4) params["epsilon"] = epsilon;
        if (i == 3) {
            params["x_threshold"] = x_threshold;
            params["y_threshold"] = y_threshold;
        }
        if (i == 4) params["alpha"] = alpha;
        std::string rep = run_json(cw_mc_run, model.m, cone.c, params);
        out.write(rep, std::string("mc ") + mc_ops[i] + ": ok");
        return 0;
    }

    for (int i = 0; i < 4; ++i) {
        if (!*bm_sub[i]) continue;
        json params{{"op", bm_ops[i]}};
        if (i <= 1) {
            params["x"] = parse_real_point(x_str);
            params["t"] = tval;
            params["terms"] = terms;
        }
        if (i == 0) params["y"] = parse_real_point(y_str);
        if (i == 3) {
            params["samples"] = check_samples;
            params["seed"] = seed;
        }
        char* rep = nullptr;
        check(cw_bm_run(cone.c, params.dump().c_str(), &rep), "bm command");
        out.write(rep, std::string("bm ") + bm_ops[i] + ": ok");
        cw_string_free(rep);
        return 0;
    }

    for (int i = 0; i < 6; ++i) {
        if (!*verify_sub[i]) continue;
        json params{{"op", verify_ops[i]}, {"truncation", trunc_json()}};
        if (i <= 3) params["x"] = parse_point(x_str);
        if (i <= 1) {
            params["window"] = parse_ll_list(window_str);
            params["tolerance"] = tolerance;
        }
        if (i == 1) params["unconstrained"] = unconstrained;
        if (i == 2) {
            params["n"] = n;
            params["A"] = A;
            params["epsilon"] = epsilon;
        }
        if (i == 3) {
            params["n_list"] = parse_ll_list(nlist_str);
            params["epsilon"] = epsilon;
            params["samples"] = samples;
            params["seed"] = seed;
            params["threads"] = threads;
            params["calibration_n"] = calibration_n;
        }
        if (i == 4) {
            params["points"] = parse_points_list();
            params["N"] = n;
        }
        if (i == 5) {
            params["points"] = parse_points_list();
            params["n_list"] = parse_ll_list(nlist_str);
            params["samples"] = samples;
            params["seed"] = seed;
            params["threads"] = threads;
        }
        std::string rep = run_json(cw_verify_run, model.m, cone.c, params);
        json j = json::parse(rep);
        bool failed = j.contains("pass") && j["pass"].is_boolean() && !j["pass"].get<bool>();
        out.write(rep, std::string("verify ") + verify_ops[i] + (failed ? ": FAIL" : ": ok"));
        return failed ? 2 : 0;
    }

    die("no subcommand selected");
}

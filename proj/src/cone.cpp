#include "conewalk/cone.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cw {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> normalized(std::vector<double> v) {
    double n = norm2(v);
    if (n <= 0.0) fail(ErrorCode::ConfigError, "zero normal vector");
    for (double& c : v) c /= n;
    return v;
}

// angle of the point relative to the wedge base, folded into [0, 2pi)
double wedge_angle(const Wedge2D& w, const std::vector<double>& x) {
    double th = std::atan2(x[1], x[0]) - w.base;
    th = std::fmod(th, kTwoPi);
    if (th < 0) th += kTwoPi;
    return th;
}

// distance from an interior point at angle a (from one ray), radius r, to
// that ray; the foot falls behind the apex when a > pi/2
double ray_distance(double r, double a) {
    return a <= std::numbers::pi / 2 ? r * std::sin(a) : r;
}

// Finds a unit interior direction for a polyhedral cone, or fails.
std::vector<double> polyhedral_interior_point(const Polyhedral& p) {
    const int d = int(p.normals.at(0).size());
    std::vector<double> z(d, 0.0);
    for (const auto& n : p.normals)
        for (int i = 0; i < d; ++i) z[i] += n[i];
    // projected subgradient ascent on min_i <n_i, z>
    for (int it = 0; it < 2000; ++it) {
        double nz = norm2(z);
        if (nz > 0)
            for (double& c : z) c /= nz;
        double worst = 1e300;
        size_t worst_i = 0;
        for (size_t i = 0; i < p.normals.size(); ++i) {
            double v = dot(p.normals[i], z);
            if (v < worst) { worst = v; worst_i = i; }
        }
        if (worst > 1e-6) return z;
        double step = 0.5 / (1.0 + it * 0.05);
        for (int i = 0; i < d; ++i) z[i] += step * p.normals[worst_i][i];
    }
    fail(ErrorCode::ConfigError, "polyhedral cone has empty interior");
}

} // namespace

ConeSpec::ConeSpec(Variant v) : variant_(std::move(v)) {
    std::visit([this](auto&& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            c.normal = normalized(c.normal);
            dim_ = int(c.normal.size());
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            if (!(c.beta > 0.0 && c.beta <= std::numbers::pi))
                fail(ErrorCode::ConfigError,
                     "wedge opening must lie in (0, pi]; wider wedges are not convex");
            dim_ = 2;
        } else if constexpr (std::is_same_v<T, Orthant>) {
            if (c.dim < 1) fail(ErrorCode::ConfigError, "orthant dimension must be >= 1");
            dim_ = c.dim;
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            if (c.dim < 2) fail(ErrorCode::ConfigError, "Weyl chamber needs dim >= 2");
            dim_ = c.dim;
        } else if constexpr (std::is_same_v<T, Polyhedral>) {
            if (c.normals.empty()) fail(ErrorCode::ConfigError, "polyhedral cone needs normals");
            for (auto& n : c.normals) n = normalized(n);
            dim_ = int(c.normals[0].size());
            for (const auto& n : c.normals)
                if (int(n.size()) != dim_)
                    fail(ErrorCode::DimensionMismatch, "inconsistent normal dimensions");
            polyhedral_interior_point(c); // nonempty interior or throw
        }
    }, variant_);
}

bool ConeSpec::contains(const std::vector<double>& x) const {
    if (int(x.size()) != dim_)
        fail(ErrorCode::DimensionMismatch, "point dimension does not match cone");
    return std::visit([&x](auto&& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            return dot(c.normal, x) > 0.0;
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            if (x[0] == 0.0 && x[1] == 0.0) return false;
            double th = wedge_angle(c, x);
            return th > 0.0 && th < c.beta;
        } else if constexpr (std::is_same_v<T, Orthant>) {
            return std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; });
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            for (size_t i = 0; i + 1 < x.size(); ++i)
                if (!(x[i] < x[i + 1])) return false;
            return true;
        } else {
            for (const auto& n : c.normals)
                if (dot(n, x) <= 0.0) return false;
            return true;
        }
    }, variant_);
}

bool ConeSpec::contains_closed(const std::vector<double>& x) const {
    if (int(x.size()) != dim_)
        fail(ErrorCode::DimensionMismatch, "point dimension does not match cone");
    return std::visit([&x](auto&& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            return dot(c.normal, x) >= 0.0;
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            if (x[0] == 0.0 && x[1] == 0.0) return true;
            double th = wedge_angle(c, x);
            return th <= c.beta || th >= kTwoPi - 1e-12;
        } else if constexpr (std::is_same_v<T, Orthant>) {
            return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; });
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            for (size_t i = 0; i + 1 < x.size(); ++i)
                if (!(x[i] <= x[i + 1])) return false;
            return true;
        } else {
            for (const auto& n : c.normals)
                if (dot(n, x) < 0.0) return false;
            return true;
        }
    }, variant_);
}

double ConeSpec::dist_boundary(const std::vector<double>& x) const {
    if (!contains(x))
        fail(ErrorCode::PointOutsideCone, "dist_boundary requires a point in the open cone");
    return std::visit([&x](auto&& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            return dot(c.normal, x);
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            double r = std::hypot(x[0], x[1]);
            double th = wedge_angle(c, x);
            return std::min(ray_distance(r, th), ray_distance(r, c.beta - th));
        } else if constexpr (std::is_same_v<T, Orthant>) {
            return *std::min_element(x.begin(), x.end());
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            double m = 1e300;
            for (size_t i = 0; i + 1 < x.size(); ++i)
                m = std::min(m, (x[i + 1] - x[i]) / std::numbers::sqrt2);
            return m;
        } else {
            double m = 1e300;
            for (const auto& n : c.normals) m = std::min(m, dot(n, x));
            return m;
        }
    }, variant_);
}

double shrunken_threshold(long long n, double epsilon) {
    return std::pow(double(n), 0.5 - epsilon);
}

bool ConeSpec::in_shrunken(const std::vector<double>& x, long long n, double epsilon) const {
    if (!contains(x)) return false;
    return dist_boundary(x) >= shrunken_threshold(n, epsilon);
}

std::string ConeSpec::variant_name() const {
    return std::visit([](auto&& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) return "halfspace";
        else if constexpr (std::is_same_v<T, Wedge2D>) return "wedge2d";
        else if constexpr (std::is_same_v<T, Orthant>) return "orthant";
        else if constexpr (std::is_same_v<T, WeylChamberA>) return "weyl_a";
        else return "polyhedral";
    }, variant_);
}

ConeSpec transform_cone(const ConeSpec& cone, const LinearTransform& t) {
    double scale = 0.0;
    if (t.is_scalar_multiple_of_identity(&scale))
        return cone; // positive scalings fix every cone through the origin

    // normals map with the inverse transpose
    auto map_normal = [&t](const std::vector<double>& n) {
        const int d = int(n.size());
        std::vector<double> out(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) out[i] += t.inverse[j][i] * n[j];
        return normalized(out);
    };

    return std::visit([&](auto&& c) -> ConeSpec {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
            return ConeSpec(HalfSpace{map_normal(c.normal)});
        } else if constexpr (std::is_same_v<T, Orthant>) {
            Polyhedral p;
            for (int i = 0; i < c.dim; ++i) {
                std::vector<double> e(c.dim, 0.0);
                e[i] = 1.0;
                p.normals.push_back(map_normal(e));
            }
            return ConeSpec(p);
        } else if constexpr (std::is_same_v<T, Wedge2D>) {
            Polyhedral p;
            // inward normals of the two boundary rays
            p.normals.push_back(map_normal({-std::sin(c.base), std::cos(c.base)}));
            p.normals.push_back(map_normal({std::sin(c.base + c.beta),
                                            -std::cos(c.base + c.beta)}));
            return ConeSpec(p);
        } else if constexpr (std::is_same_v<T, WeylChamberA>) {
            fail(ErrorCode::UnsupportedTransform,
                 "only scalar transforms preserve the Weyl chamber");
        } else {
            Polyhedral p;
            for (const auto& n : c.normals) p.normals.push_back(map_normal(n));
            return ConeSpec(p);
        }
    }, cone.variant());
}

ConeSpec cone_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("cone JSON parse error: ") + e.what());
    }
    try {
        std::string v = j.at("variant").get<std::string>();
        if (v == "halfspace")
            return ConeSpec(HalfSpace{j.at("normal").get<std::vector<double>>()});
        if (v == "wedge2d")
            return ConeSpec(Wedge2D{j.at("beta").get<double>(),
                                    j.value("base", 0.0)});
        if (v == "orthant")
            return ConeSpec(Orthant{j.at("dim").get<int>()});
        if (v == "weyl_a" || v == "weyl")
            return ConeSpec(WeylChamberA{j.at("dim").get<int>()});
        if (v == "polyhedral")
            return ConeSpec(Polyhedral{j.at("normals").get<std::vector<std::vector<double>>>()});
        fail(ErrorCode::ConfigError, "unknown cone variant: " + v);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("cone JSON schema error: ") + e.what());
    }
}

ConeSpec cone_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open cone file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return cone_from_json(ss.str());
}

std::string cone_to_json(const ConeSpec& cone) {
    json j;
    j["variant"] = cone.variant_name();
    std::visit([&j](auto&& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HalfSpace>) j["normal"] = c.normal;
        else if constexpr (std::is_same_v<T, Wedge2D>) { j["beta"] = c.beta; j["base"] = c.base; }
        else if constexpr (std::is_same_v<T, Orthant>) j["dim"] = c.dim;
        else if constexpr (std::is_same_v<T, WeylChamberA>) j["dim"] = c.dim;
        else j["normals"] = c.normals;
    }, cone.variant());
    return j.dump(2);
}

} // namespace cw

#include "conewalk/walk_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "conewalk/cone.hpp"

namespace cw {

using nlohmann::json;

int StepDistribution::max_step_norm_inf() const {
    int m = 0;
    for (const auto& s : steps)
        for (int c : s.v) m = std::max(m, std::abs(c));
    return m;
}

double StepDistribution::max_step_norm2() const {
    double m = 0.0;
    for (const auto& s : steps) {
        double n2 = 0.0;
        for (int c : s.v) n2 += double(c) * c;
        m = std::max(m, std::sqrt(n2));
    }
    return m;
}

std::vector<double> LinearTransform::apply(const std::vector<double>& x) const {
    std::vector<double> y(matrix.size(), 0.0);
    for (size_t i = 0; i < matrix.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) y[i] += matrix[i][j] * x[j];
    return y;
}

std::vector<double> LinearTransform::apply_inverse(const std::vector<double>& x) const {
    std::vector<double> y(inverse.size(), 0.0);
    for (size_t i = 0; i < inverse.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) y[i] += inverse[i][j] * x[j];
    return y;
}

LinearTransform LinearTransform::identity(int d) {
    LinearTransform t;
    t.matrix.assign(d, std::vector<double>(d, 0.0));
    t.inverse.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) t.matrix[i][i] = t.inverse[i][i] = 1.0;
    return t;
}

bool LinearTransform::is_scalar_multiple_of_identity(double* scale) const {
    const double s = matrix.empty() ? 1.0 : matrix[0][0];
    for (size_t i = 0; i < matrix.size(); ++i)
        for (size_t j = 0; j < matrix.size(); ++j) {
            double want = (i == j) ? s : 0.0;
            if (std::abs(matrix[i][j] - want) > 1e-12 * std::max(1.0, std::abs(s)))
                return false;
        }
    if (scale) *scale = s;
    return s > 0.0;
}

namespace {

Rational parse_probability(const json& j, bool* exact) {
    if (j.is_number()) {
        *exact = false;
        double v = j.get<double>();
        // keep the double image; the rational slot gets a best-effort value
        return Rational(BigInt(llround(v * 1e18)), BigInt(1000000000000000000LL));
    }
    std::string s = j.get<std::string>();
    auto slash = s.find('/');
    *exact = true;
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) fail(ErrorCode::ConfigError, "zero denominator in probability " + s);
        return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s), BigInt(1));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(BigInt(digits), den);
}

// Hermite-normal-form basis of the integer lattice spanned by the rows.
// Returns the basis rows; det_out gets the lattice index in Z^d (0 when the
// span is lower-dimensional).
std::vector<std::vector<long long>> hermite_basis(std::vector<std::vector<long long>> rows,
                                                  int d, long long* det_out) {
    std::vector<std::vector<long long>> basis;
    int col = 0;
    size_t rank = 0;
    while (col < d && rank < rows.size()) {
        // pivot: smallest nonzero |entry| in this column at/below `rank`
        size_t piv = rows.size();
        for (size_t r = rank; r < rows.size(); ++r)
            if (rows[r][col] != 0 &&
                (piv == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[piv][col])))
                piv = r;
        if (piv == rows.size()) { ++col; continue; }
        std::swap(rows[rank], rows[piv]);
        bool reduced = true;
        for (size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][col] == 0) continue;
            long long q = rows[r][col] / rows[rank][col];
            for (int j = 0; j < d; ++j) rows[r][j] -= q * rows[rank][j];
            if (rows[r][col] != 0) reduced = false;
        }
        if (!reduced) continue; // repeat with a smaller pivot
        if (rows[rank][col] < 0)
            for (int j = 0; j < d; ++j) rows[rank][j] = -rows[rank][j];
        ++rank;
        ++col;
    }
    rows.resize(rank);
    long long det = 1;
    if (int(rank) < d) {
        det = 0;
    } else {
        // after forward elimination the basis is upper triangular in the
        // pivot columns; the product of pivots is the index
        for (size_t r = 0; r < rank; ++r) det *= rows[r][r];
        det = std::llabs(det);
    }
    if (det_out) *det_out = det;
    return rows;
}

bool all_exact(const StepDistribution& m) {
    return std::all_of(m.steps.begin(), m.steps.end(),
                       [](const Step& s) { return s.exact; });
}

// Symmetric Jacobi eigendecomposition, small d.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigvals,
                  std::vector<std::vector<double>>& eigvecs) {
    const int n = int(a.size());
    eigvecs.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) eigvecs[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = eigvecs[k][p], vkq = eigvecs[k][q];
                    eigvecs[k][p] = c * vkp - s * vkq;
                    eigvecs[k][q] = s * vkp + c * vkq;
                }
            }
    }
    eigvals.resize(n);
    for (int i = 0; i < n; ++i) eigvals[i] = a[i][i];
}

} // namespace

std::vector<std::vector<double>> covariance_of(const StepDistribution& m) {
    const int d = m.dim;
    std::vector<std::vector<double>> q(d, std::vector<double>(d, 0.0));
    if (all_exact(m)) {
        std::vector<std::vector<Rational>> qe(d, std::vector<Rational>(d, Rational(0)));
        for (const auto& s : m.steps)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    qe[i][j] += s.prob_exact * s.v[i] * s.v[j];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q[i][j] = double(qe[i][j]);
    } else {
        for (const auto& s : m.steps)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) q[i][j] += s.prob * s.v[i] * s.v[j];
    }
    return q;
}

int detect_period(const StepDistribution& m, int max_word_len) {
    const int d = m.dim;
    if (max_word_len <= 0) max_word_len = 2 * (d + 2);
    // BFS over reachable points; collect gcd of all return lengths.
    std::set<std::vector<int>> frontier = {std::vector<int>(d, 0)};
    int g = 0;
    for (int len = 1; len <= max_word_len; ++len) {
        std::set<std::vector<int>> next;
        for (const auto& pt : frontier)
            for (const auto& s : m.steps) {
                std::vector<int> q(pt);
                for (int i = 0; i < d; ++i) q[i] += s.v[i];
                next.insert(std::move(q));
            }
        if (next.count(std::vector<int>(d, 0))) g = std::gcd(g, len);
        if (g == 1) return 1;
        frontier = std::move(next);
    }
    return g == 0 ? 1 : g;
}

ModelReport validate_model(const StepDistribution& m) {
    const int d = m.dim;
    if (d <= 0 || m.steps.empty())
        fail(ErrorCode::ConfigError, "empty step distribution");
    for (const auto& s : m.steps) {
        if (int(s.v.size()) != d)
            fail(ErrorCode::DimensionMismatch, "step dimension mismatch");
        if (s.prob <= 0.0)
            fail(ErrorCode::ConfigError, "probabilities must be strictly positive");
    }
    const bool exact = all_exact(m);

    // probability normalization
    if (exact) {
        Rational sum(0);
        for (const auto& s : m.steps) sum += s.prob_exact;
        if (sum != Rational(1))
            fail(ErrorCode::ConfigError, "probabilities must sum to 1 exactly");
    } else {
        double sum = 0.0;
        for (const auto& s : m.steps) sum += s.prob;
        if (std::abs(sum - 1.0) > 1e-12)
            fail(ErrorCode::ConfigError, "probabilities must sum to 1 within 1e-12");
    }

    ModelReport rep;
    rep.mean.assign(d, 0.0);
    if (exact) {
        std::vector<Rational> mean(d, Rational(0));
        for (const auto& s : m.steps)
            for (int i = 0; i < d; ++i) mean[i] += s.prob_exact * s.v[i];
        for (int i = 0; i < d; ++i) {
            if (mean[i] != Rational(0))
                fail(ErrorCode::NonZeroDrift, "mean is not exactly zero");
            rep.mean[i] = 0.0;
        }
    } else {
        for (const auto& s : m.steps)
            for (int i = 0; i < d; ++i) rep.mean[i] += s.prob * s.v[i];
        for (int i = 0; i < d; ++i)
            if (std::abs(rep.mean[i]) > 1e-12)
                fail(ErrorCode::NonZeroDrift, "mean exceeds the 1e-12 drift tolerance");
    }

    rep.covariance = covariance_of(m);

    // lattice generated by the support (group closure: support and negated
    // support span the same group since the mean is zero and steps repeat)
    std::vector<std::vector<long long>> rows;
    for (const auto& s : m.steps)
        rows.emplace_back(s.v.begin(), s.v.end());
    rep.sublattice_basis = hermite_basis(rows, d, &rep.support_lattice_index);
    if (rep.support_lattice_index == 0)
        fail(ErrorCode::DegenerateSupport, "support spans fewer than d dimensions");

    // step-difference lattice: index in Z^d is the density factor for
    // unconstrained local limit comparisons
    std::vector<std::vector<long long>> diffs;
    for (size_t i = 1; i < m.steps.size(); ++i) {
        std::vector<long long> r(d);
        for (int j = 0; j < d; ++j) r[j] = m.steps[i].v[j] - m.steps[0].v[j];
        diffs.push_back(std::move(r));
    }
    long long diff_index = 0;
    if (!diffs.empty()) hermite_basis(diffs, d, &diff_index);
    rep.reachable_lattice_index = diff_index; // 0 when the walk is supported on a coset line

    rep.period = detect_period(m);
    rep.aperiodic = (rep.period == 1) && (rep.support_lattice_index == 1);
    rep.moments_finite = true;
    return rep;
}

ModelReport validate_model(const StepDistribution& m, const ConeSpec& cone) {
    ModelReport rep = validate_model(m);
    for (const auto& s : m.steps) {
        std::vector<double> neg(m.dim);
        for (int i = 0; i < m.dim; ++i) neg[i] = -double(s.v[i]);
        if (cone.contains(neg)) { rep.reverse_reachability_hint = true; break; }
    }
    return rep;
}

std::pair<RealStepDistribution, LinearTransform> decorrelate(const StepDistribution& m) {
    const int d = m.dim;
    auto q = covariance_of(m);
    std::vector<double> lam;
    std::vector<std::vector<double>> vec;
    jacobi_eigen(q, lam, vec);
    for (double l : lam)
        if (l <= 1e-12) fail(ErrorCode::SingularCovariance, "covariance not positive definite");

    LinearTransform t;
    t.matrix.assign(d, std::vector<double>(d, 0.0));
    t.inverse.assign(d, std::vector<double>(d, 0.0));
    // M = Q^{-1/2} (symmetric), so M Q M^T = I
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                t.matrix[i][j] += vec[i][k] * vec[j][k] / std::sqrt(lam[k]);
                t.inverse[i][j] += vec[i][k] * vec[j][k] * std::sqrt(lam[k]);
            }

    RealStepDistribution out;
    out.dim = d;
    for (const auto& s : m.steps) {
        std::vector<double> v(s.v.begin(), s.v.end());
        out.steps.emplace_back(t.apply(v), s.prob);
    }
    return {out, t};
}

StepDistribution reverse(const StepDistribution& m) {
    StepDistribution out = m;
    for (auto& s : out.steps)
        for (int& c : s.v) c = -c;
    return out;
}

StepDistribution model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("model JSON parse error: ") + e.what());
    }
    StepDistribution m;
    try {
        m.dim = j.at("dim").get<int>();
        for (const auto& js : j.at("steps")) {
            Step s;
            s.v = js.at("v").get<std::vector<int>>();
            s.prob_exact = parse_probability(js.at("p"), &s.exact);
            s.prob = js.at("p").is_number() ? js.at("p").get<double>()
                                            : double(s.prob_exact);
            m.steps.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("model JSON schema error: ") + e.what());
    }
    return m;
}

StepDistribution model_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

std::string model_to_json(const StepDistribution& m) {
    json j;
    j["dim"] = m.dim;
    j["steps"] = json::array();
    for (const auto& s : m.steps) {
        json js;
        js["v"] = s.v;
        if (s.exact) {
            std::ostringstream os;
            os << boost::multiprecision::numerator(s.prob_exact) << "/"
               << boost::multiprecision::denominator(s.prob_exact);
            js["p"] = os.str();
        } else {
            js["p"] = s.prob;
        }
        j["steps"].push_back(js);
    }
    return j.dump(2);
}

} // namespace cw

#ifndef CONEWALK_EXACT_HPP
#define CONEWALK_EXACT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "conewalk/cone.hpp"
#include "conewalk/walk_model.hpp"

namespace cw::exact {

struct TruncationPolicy {
    enum class Mode { Auto, Full, Radius };
    Mode mode = Mode::Auto;
    double c = 4.0;           // Auto: window radius |x|_inf + c*sqrt(n log n)
    long long radius = 0;     // Radius mode: fixed L-inf radius

    static TruncationPolicy full() { return {Mode::Full, 0.0, 0}; }
    static TruncationPolicy fixed(long long r) { return {Mode::Radius, 0.0, r}; }
};

enum class Killing {
    Open,    // boundary lattice points absorb
    Closed,  // boundary allowed (path counting convention)
    None,    // unconstrained control runs
};

namespace detail {

// Packed lattice coordinates: d fields of `bits` bits each, offset so the
// packing is order-preserving and shifting by a step is a constant key delta.
struct KeyCodec {
    int dim = 0;
    int bits = 0;
    int64_t offset = 0;
    int64_t mask = 0;

    explicit KeyCodec(int d) : dim(d) {
        bits = 62 / d;
        offset = int64_t(1) << (bits - 1);
        mask = (int64_t(1) << bits) - 1;
    }
    int64_t encode(const int* c) const {
        int64_t k = 0;
        for (int i = 0; i < dim; ++i)
            k = (k << bits) | ((int64_t(c[i]) + offset) & mask);
        return k;
    }
    void decode(int64_t k, int* c) const {
        for (int i = dim - 1; i >= 0; --i) {
            c[i] = int((k & mask) - offset);
            k >>= bits;
        }
    }
    // Key delta of a shift. The packing is linear in the coordinates, so
    // encode(x + s) - encode(x) is the signed sum of s_i * 2^(bits * pos);
    // plain integer addition then carries borrows across fields correctly.
    // Valid as long as no field under/overflows, which the window bound
    // guarantees.
    int64_t delta(const std::vector<int>& s) const {
        int64_t k = 0;
        for (int i = 0; i < dim; ++i)
            k = k * (int64_t(1) << bits) + int64_t(s[i]);
        return k;
    }
    long long max_coord() const { return (int64_t(1) << (bits - 1)) - 2; }
};

} // namespace detail

/// Sparse layer convolution with killing at the cone boundary.
///
/// Layers are sorted (key, mass) arrays; a step shift is a constant key
/// delta, so the per-step shifted arrays stay sorted and one pass of k-way
/// merging produces the next layer. Accumulation order per target point is
/// the step order, independent of any partitioning.
template <class Mass>
class LayerEngine {
public:
    LayerEngine(const StepDistribution& model, const ConeSpec& cone,
                std::vector<int> start, TruncationPolicy policy = {},
                Killing killing = Killing::Open)
        : codec_(model.dim), cone_(cone), policy_(policy),
          killing_(killing), dim_(model.dim), start_(std::move(start)) {
        if (int(start_.size()) != dim_)
            fail(ErrorCode::DimensionMismatch, "start point dimension mismatch");
        std::vector<double> xd(start_.begin(), start_.end());
        if (!point_inside(xd))
            fail(ErrorCode::StartOutsideCone, "start point not in cone");
        for (const auto& s : model.steps) {
            deltas_.push_back(codec_.delta(s.v));
            probs_.push_back(step_mass(s));
            max_step_ = std::max(max_step_, (long long)norm_inf(s.v));
        }
        start_norm_ = norm_inf(start_);
        keys_ = {codec_.encode(start_.data())};
        masses_ = {Mass(1)};
        absorbed_ = Mass(0);
        trunc_loss_ = Mass(0);
    }

    long long step_index() const { return n_; }

    void advance() {
        ++n_;
        const long long R = window_radius(n_);
        const size_t k = deltas_.size();
        std::vector<size_t> idx(k, 0);
        std::vector<int64_t> out_keys;
        std::vector<Mass> out_masses;
        out_keys.reserve(keys_.size() * 2 + 8);
        out_masses.reserve(keys_.size() * 2 + 8);
        int coords[8];
        std::vector<double> xd(dim_);
        while (true) {
            int64_t best = std::numeric_limits<int64_t>::max();
            for (size_t s = 0; s < k; ++s)
                if (idx[s] < keys_.size())
                    best = std::min(best, keys_[idx[s]] + deltas_[s]);
            if (best == std::numeric_limits<int64_t>::max()) break;
            Mass acc = Mass(0);
            for (size_t s = 0; s < k; ++s) {
                while (idx[s] < keys_.size() && keys_[idx[s]] + deltas_[s] == best) {
                    acc += masses_[idx[s]] * probs_[s];
                    ++idx[s];
                }
            }
            codec_.decode(best, coords);
            for (int i = 0; i < dim_; ++i) xd[i] = coords[i];
            if (!point_inside(xd)) {
                absorbed_ += acc;
            } else if (norm_inf_c(coords) > R) {
                trunc_loss_ += acc;
            } else {
                out_keys.push_back(best);
                out_masses.push_back(acc);
            }
        }
        keys_.swap(out_keys);
        masses_.swap(out_masses);
    }

    Mass total_mass() const {
        Mass t = Mass(0);
        for (const auto& m : masses_) t += m;
        return t;
    }

    Mass mass_at(const std::vector<int>& y) const {
        int64_t key = codec_.encode(y.data());
        auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
        if (it == keys_.end() || *it != key) return Mass(0);
        return masses_[size_t(it - keys_.begin())];
    }

    const Mass& absorbed() const { return absorbed_; }
    const Mass& truncation_loss() const { return trunc_loss_; }
    size_t support_size() const { return keys_.size(); }

    /// sum of f(point) * mass over the layer, in double precision.
    double weighted_sum(const std::function<double(const std::vector<double>&)>& f) const {
        double acc = 0.0;
        int coords[8];
        std::vector<double> xd(dim_);
        for (size_t i = 0; i < keys_.size(); ++i) {
            codec_.decode(keys_[i], coords);
            for (int j = 0; j < dim_; ++j) xd[j] = coords[j];
            acc += f(xd) * double(masses_[i]);
        }
        return acc;
    }

    std::vector<std::pair<std::vector<int>, Mass>> to_sparse() const {
        std::vector<std::pair<std::vector<int>, Mass>> out;
        out.reserve(keys_.size());
        int coords[8];
        for (size_t i = 0; i < keys_.size(); ++i) {
            codec_.decode(keys_[i], coords);
            out.emplace_back(std::vector<int>(coords, coords + dim_), masses_[i]);
        }
        return out;
    }

    /// |1 - live - absorbed - truncated|; zero in exact arithmetic.
    Mass ledger_defect() const {
        Mass d = Mass(1) - total_mass() - absorbed_ - trunc_loss_;
        return d < Mass(0) ? Mass(-d) : d;
    }

    long long window_radius(long long n) const {
        long long hard = start_norm_ + n * max_step_;
        switch (policy_.mode) {
            case TruncationPolicy::Mode::Full:
                return std::min(hard, codec_.max_coord());
            case TruncationPolicy::Mode::Radius:
                return policy_.radius;
            case TruncationPolicy::Mode::Auto:
            default: {
                double nn = double(std::max<long long>(n, 2));
                long long soft = start_norm_ +
                    (long long)std::ceil(policy_.c * max_step_ * std::sqrt(nn * std::log(nn)));
                return std::min({hard, soft, codec_.max_coord()});
            }
        }
    }

private:
    static Mass step_mass(const Step& s);
    static long long norm_inf(const std::vector<int>& v) {
        long long m = 0;
        for (int c : v) m = std::max(m, (long long)std::abs(c));
        return m;
    }
    bool point_inside(const std::vector<double>& xd) const {
        switch (killing_) {
            case Killing::None: return true;
            case Killing::Closed: return cone_.contains_closed(xd);
            case Killing::Open: default: return cone_.contains(xd);
        }
    }
    long long norm_inf_c(const int* c) const {
        long long m = 0;
        for (int i = 0; i < dim_; ++i) m = std::max(m, (long long)std::abs(c[i]));
        return m;
    }

    detail::KeyCodec codec_;
    ConeSpec cone_;
    TruncationPolicy policy_;
    Killing killing_;
    int dim_;
    std::vector<int> start_;
    long long start_norm_ = 0;
    long long max_step_ = 0;
    long long n_ = 0;
    std::vector<int64_t> deltas_;
    std::vector<Mass> probs_;
    std::vector<int64_t> keys_;
    std::vector<Mass> masses_;
    Mass absorbed_;
    Mass trunc_loss_;
};

template <> double LayerEngine<double>::step_mass(const Step& s);
template <> Rational LayerEngine<Rational>::step_mass(const Step& s);
template <> BigInt LayerEngine<BigInt>::step_mass(const Step& s);

extern template class LayerEngine<double>;
extern template class LayerEngine<Rational>;
extern template class LayerEngine<BigInt>;

struct SurvivalSeries {
    std::vector<int> x;
    std::vector<double> values;      // P(tau_x > n), n = 0..N
    std::vector<double> trunc_loss;  // accumulated per layer
};

struct LocalProbability {
    double value = 0.0;
    double truncation_loss = 0.0;
};

struct GreenPartial {
    double partial_sum = 0.0;
    double tail_estimate = 0.0;
    double truncation_loss = 0.0;
};

struct HarmonicSeries {
    std::vector<double> values;   // E[u(x+S(n)); tau_x > n]
    double convergence = 0.0;     // |v_N - v_{N/2}| / v_N
};

SurvivalSeries survival(const StepDistribution& model, const ConeSpec& cone,
                        const std::vector<int>& x, long long N,
                        TruncationPolicy policy = {});

LocalProbability local_probability(const StepDistribution& model, const ConeSpec& cone,
                                   const std::vector<int>& x, const std::vector<int>& y,
                                   long long n, TruncationPolicy policy = {});

GreenPartial green_partial(const StepDistribution& model, const ConeSpec& cone,
                           const std::vector<int>& x, const std::vector<int>& y,
                           long long N, TruncationPolicy policy = {});

HarmonicSeries harmonic_V(const StepDistribution& model, const ConeSpec& cone,
                          const std::function<double(const std::vector<double>&)>& u,
                          const std::vector<int>& x, long long N,
                          TruncationPolicy policy = {});

/// Pure path counting in the closed cone (boundary allowed), uniform steps.
BigInt excursion_count(const std::vector<std::vector<int>>& stepset, const ConeSpec& cone,
                       const std::vector<int>& x, const std::vector<int>& y, long long n);

/// One combined pass: survival series plus per-layer mass at y and, when u is
/// given, the harmonic sums. Used by the verifier to avoid repeated DP runs.
struct SeriesBundle {
    SurvivalSeries survival;
    std::vector<double> local_at_y;     // empty when y not requested
    std::vector<double> harmonic;       // empty when u not given
};

SeriesBundle run_series(const StepDistribution& model, const ConeSpec& cone,
                        const std::vector<int>& x, long long N,
                        const std::vector<int>* y,
                        const std::function<double(const std::vector<double>&)>* u,
                        TruncationPolicy policy = {}, Killing killing = Killing::Open);

} // namespace cw::exact

#endif

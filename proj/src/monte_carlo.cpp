#include "conewalk/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <boost/math/distributions/binomial.hpp>

namespace cw::mc {

namespace {

constexpr long long kBlock = 4096;

// Per-block sums centered on the block's first value; avoids catastrophic
// cancellation in the variance (exact zero for constant samples).
struct BlockAccum {
    double ref = 0.0;
    double sum = 0.0;    // sum of (v - ref)
    double sumsq = 0.0;  // sum of (v - ref)^2
    long long count = 0;
    long long censored = 0;
};

// Runs one value per sample with counter-based per-sample streams. Blocks
// have a fixed size and are reduced in block order, so the result is
// identical for any thread count.
template <class F>
MCEstimate run_samples(long long samples, uint64_t seed, int threads, F&& per_sample) {
    const long long nblocks = (samples + kBlock - 1) / kBlock;
    std::vector<BlockAccum> acc(static_cast<size_t>(nblocks));
    std::atomic<long long> next{0};
    auto worker = [&] {
        for (;;) {
            long long b = next.fetch_add(1);
            if (b >= nblocks) break;
            BlockAccum a;
            const long long lo = b * kBlock;
            const long long hi = std::min(samples, lo + kBlock);
            for (long long i = lo; i < hi; ++i) {
                CounterRng rng(seed, uint64_t(i));
                bool censored = false;
                double v = per_sample(rng, &censored);
                if (a.count == 0) a.ref = v;
                double c = v - a.ref;
                a.sum += c;
                a.sumsq += c * c;
                ++a.count;
                if (censored) ++a.censored;
            }
            acc[size_t(b)] = a;
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // combine blocks in block order (mean/M2 merge), so the result does not
    // depend on which thread ran which block
    double mean = 0.0, m2 = 0.0;
    long long count = 0, censored = 0;
    for (const auto& a : acc) {
        if (a.count == 0) continue;
        double bmean = a.ref + a.sum / double(a.count);
        double bm2 = std::max(0.0, a.sumsq - a.sum * a.sum / double(a.count));
        double delta = bmean - mean;
        long long tot = count + a.count;
        m2 += bm2 + delta * delta * double(count) * double(a.count) / double(tot);
        mean += delta * double(a.count) / double(tot);
        count = tot;
        censored += a.censored;
    }
    MCEstimate est;
    est.samples = samples;
    est.seed = seed;
    est.substream_count = samples;
    est.mean = mean;
    double var = samples > 1 ? m2 / double(samples - 1) : 0.0;
    est.std_error = std::sqrt(var / double(samples));
    est.censored_fraction = double(censored) / double(samples);
    return est;
}

struct WalkSim {
    const StepDistribution& model;
    AliasTable alias;
    int d;

    explicit WalkSim(const StepDistribution& m)
        : model(m), alias(probs_of(m)), d(m.dim) {}

    static std::vector<double> probs_of(const StepDistribution& m) {
        std::vector<double> p;
        for (const auto& s : m.steps) p.push_back(s.prob);
        return p;
    }

    void step(CounterRng& rng, std::vector<long long>& pos) const {
        const Step& s = model.steps[size_t(alias.sample(rng))];
        for (int i = 0; i < d; ++i) pos[i] += s.v[i];
    }
};

void check_start(const ConeSpec& cone, const std::vector<int>& x) {
    std::vector<double> xd(x.begin(), x.end());
    if (!cone.contains(xd))
        fail(ErrorCode::StartOutsideCone, "start point not in cone");
}

} // namespace

MCEstimate mc_survival(const StepDistribution& model, const ConeSpec& cone,
                       const std::vector<int>& x, long long n,
                       long long samples, uint64_t seed, int threads) {
    check_start(cone, x);
    if (n == 0) {
        MCEstimate est;
        est.mean = 1.0;
        est.samples = samples;
        est.seed = seed;
        est.substream_count = samples;
        return est;
    }
    WalkSim sim(model);
    const int d = model.dim;
    return run_samples(samples, seed, threads, [&](CounterRng& rng, bool*) -> double {
        std::vector<long long> pos(x.begin(), x.end());
        std::vector<double> xd(d);
        for (long long k = 0; k < n; ++k) {
            sim.step(rng, pos);
            for (int i = 0; i < d; ++i) xd[i] = double(pos[i]);
            if (!cone.contains(xd)) return 0.0;
        }
        return 1.0;
    });
}

MCEstimate mc_boundary_functional(const StepDistribution& reversed_model,
                                  const ConeSpec& cone, const ReduiteFn& u,
                                  const EvalFrame& frame,
                                  const std::vector<int>& y, long long n, double epsilon,
                                  long long samples, uint64_t seed, int threads) {
    check_start(cone, y);
    WalkSim sim(reversed_model);
    const int d = reversed_model.dim;
    const double sqrtn = std::sqrt(double(n));
    const double threshold = shrunken_threshold(n, epsilon);
    return run_samples(samples, seed, threads, [&](CounterRng& rng, bool* censored) -> double {
        std::vector<long long> pos(y.begin(), y.end());
        std::vector<double> xd(d), mapped(d);
        for (long long m = 0; m <= n; ++m) {
            if (m > 0) sim.step(rng, pos);
            for (int i = 0; i < d; ++i) xd[i] = double(pos[i]);
            mapped = frame.transform.apply(xd);
            if (!frame.cone_decor.contains(mapped)) {
                if (m == 0) break; // start already outside (cannot happen: checked)
                return 0.0;        // exited before reaching the shrunken cone
            }
            if (frame.cone_decor.dist_boundary(mapped) >= threshold) {
                for (int i = 0; i < d; ++i) mapped[i] /= sqrtn;
                return u.eval(mapped);
            }
        }
        *censored = true;
        return 0.0;
    });
}

TailEstimate mc_stopping_time_tail(const StepDistribution& model, const ConeSpec& cone,
                                   const EvalFrame& frame,
                                   const std::vector<int>& x, long long n, double epsilon,
                                   long long samples, uint64_t seed, int threads) {
    WalkSim sim(model);
    const int d = model.dim;
    const double threshold = shrunken_threshold(n, epsilon);
    const long long horizon = (long long)std::ceil(std::pow(double(n), 1.0 - epsilon));
    MCEstimate est = run_samples(samples, seed, threads, [&](CounterRng& rng, bool*) -> double {
        std::vector<long long> pos(x.begin(), x.end());
        std::vector<double> xd(d), mapped(d);
        // event: neither exit nor entry into the shrunken cone before horizon
        for (long long m = 0; m < horizon; ++m) {
            if (m > 0) sim.step(rng, pos);
            for (int i = 0; i < d; ++i) xd[i] = double(pos[i]);
            mapped = frame.transform.apply(xd);
            if (!frame.cone_decor.contains(mapped)) return 0.0;                 // tau < horizon
            if (frame.cone_decor.dist_boundary(mapped) >= threshold) return 0.0; // t < horizon
        }
        return 1.0;
    });
    TailEstimate out;
    out.frequency = est.mean;
    out.hits = llround(est.mean * double(samples));
    out.samples = samples;
    out.seed = seed;
    out.ci_low = boost::math::binomial_distribution<double>::find_lower_bound_on_p(
        double(samples), double(out.hits), 0.025);
    out.ci_high = boost::math::binomial_distribution<double>::find_upper_bound_on_p(
        double(samples), double(out.hits), 0.025);
    return out;
}

double fuk_nagaev_bound(int d, double x_thresh, double y_thresh, long long n) {
    const double sd = std::sqrt(double(d));
    const double a = x_thresh / (sd * y_thresh);
    return 2.0 * d * std::exp(a) * std::pow(sd * double(n) / (x_thresh * y_thresh), a);
}

FukNagaevResult mc_fuk_nagaev(const StepDistribution& model,
                              double x_thresh, double y_thresh, long long n,
                              long long samples, uint64_t seed, int threads) {
    if (x_thresh <= 0.0 || y_thresh <= 0.0)
        fail(ErrorCode::ConfigError, "thresholds must be positive");
    WalkSim sim(model);
    const int d = model.dim;
    // per-step Euclidean norms are known up front
    std::vector<double> step_norm;
    for (const auto& s : model.steps) {
        double n2 = 0.0;
        for (int c : s.v) n2 += double(c) * c;
        step_norm.push_back(std::sqrt(n2));
    }
    FukNagaevResult out;
    out.rhs = fuk_nagaev_bound(d, x_thresh, y_thresh, n);
    out.lhs = run_samples(samples, seed, threads, [&](CounterRng& rng, bool*) -> double {
        std::vector<long long> pos(d, 0);
        bool max_ok = true;
        for (long long k = 0; k < n; ++k) {
            int idx = sim.alias.sample(rng);
            const Step& s = model.steps[size_t(idx)];
            for (int i = 0; i < d; ++i) pos[i] += s.v[i];
            if (step_norm[size_t(idx)] > y_thresh) { max_ok = false; break; }
        }
        if (!max_ok) return 0.0;
        double n2 = 0.0;
        for (long long c : pos) n2 += double(c) * c;
        return std::sqrt(n2) > x_thresh ? 1.0 : 0.0;
    });
    return out;
}

MCEstimate mc_max_displacement_moment(const StepDistribution& model, const ConeSpec& cone,
                                      const std::vector<int>& x, long long n, double epsilon,
                                      double alpha, long long samples, uint64_t seed,
                                      int threads) {
    check_start(cone, x);
    WalkSim sim(model);
    const int d = model.dim;
    const long long horizon = (long long)std::floor(std::pow(double(n), 1.0 - epsilon));
    const double cut = std::pow(double(n), 0.5 - epsilon / 8.0);
    return run_samples(samples, seed, threads, [&](CounterRng& rng, bool*) -> double {
        std::vector<long long> disp(d, 0), pos(x.begin(), x.end());
        std::vector<double> xd(d);
        double smax = 0.0;
        for (long long l = 1; l <= horizon; ++l) {
            int idx = sim.alias.sample(rng);
            const Step& s = model.steps[size_t(idx)];
            for (int i = 0; i < d; ++i) { disp[i] += s.v[i]; pos[i] += s.v[i]; }
            for (int i = 0; i < d; ++i) xd[i] = double(pos[i]);
            if (!cone.contains(xd)) break; // tau_x = l: stop collecting
            double n2 = 0.0;
            for (long long c : disp) n2 += double(c) * c;
            smax = std::max(smax, std::sqrt(n2));
        }
        if (smax < cut) return 0.0;
        return alpha == 0.0 ? 1.0 : std::pow(smax, alpha);
    });
}

} // namespace cw::mc

#include "conewalk/exact.hpp"

#include <cmath>

namespace cw::exact {

template <>
double LayerEngine<double>::step_mass(const Step& s) { return s.prob; }

template <>
Rational LayerEngine<Rational>::step_mass(const Step& s) {
    if (!s.exact)
        fail(ErrorCode::ConfigError, "rational mode requires exact step probabilities");
    return s.prob_exact;
}

template <>
BigInt LayerEngine<BigInt>::step_mass(const Step&) { return BigInt(1); }

template class LayerEngine<double>;
template class LayerEngine<Rational>;
template class LayerEngine<BigInt>;

SeriesBundle run_series(const StepDistribution& model, const ConeSpec& cone,
                        const std::vector<int>& x, long long N,
                        const std::vector<int>* y,
                        const std::function<double(const std::vector<double>&)>* u,
                        TruncationPolicy policy, Killing killing) {
    LayerEngine<double> eng(model, cone, x, policy, killing);
    SeriesBundle out;
    out.survival.x = x;
    out.survival.values.reserve(N + 1);
    out.survival.trunc_loss.reserve(N + 1);
    auto record = [&] {
        out.survival.values.push_back(eng.total_mass());
        out.survival.trunc_loss.push_back(eng.truncation_loss());
        if (y) out.local_at_y.push_back(eng.mass_at(*y));
        if (u) out.harmonic.push_back(eng.weighted_sum(*u));
    };
    record();
    for (long long n = 1; n <= N; ++n) {
        eng.advance();
        record();
    }
    return out;
}

SurvivalSeries survival(const StepDistribution& model, const ConeSpec& cone,
                        const std::vector<int>& x, long long N, TruncationPolicy policy) {
    return run_series(model, cone, x, N, nullptr, nullptr, policy).survival;
}

LocalProbability local_probability(const StepDistribution& model, const ConeSpec& cone,
                                   const std::vector<int>& x, const std::vector<int>& y,
                                   long long n, TruncationPolicy policy) {
    if (n == 0) {
        LocalProbability out;
        out.value = (x == y) ? 1.0 : 0.0;
        return out;
    }
    LayerEngine<double> eng(model, cone, x, policy);
    for (long long i = 0; i < n; ++i) eng.advance();
    return {eng.mass_at(y), eng.truncation_loss()};
}

GreenPartial green_partial(const StepDistribution& model, const ConeSpec& cone,
                           const std::vector<int>& x, const std::vector<int>& y,
                           long long N, TruncationPolicy policy) {
    auto bundle = run_series(model, cone, x, N, &y, nullptr, policy);
    GreenPartial out;
    for (double v : bundle.local_at_y) out.partial_sum += v;
    out.truncation_loss = bundle.survival.trunc_loss.back();

    // tail estimate from the observed power-law decay over the top half of
    // the series (only meaningful when the tail is still visibly decaying)
    double last = bundle.local_at_y.back();
    if (last > 0.0 && N >= 8) {
        double ref = bundle.local_at_y[N / 2];
        if (ref > last && ref > 0.0) {
            double slope = std::log(last / ref) / std::log(double(N) / double(N / 2));
            if (slope < -1.0)
                out.tail_estimate = last * double(N) / (-slope - 1.0);
        }
    }
    return out;
}

HarmonicSeries harmonic_V(const StepDistribution& model, const ConeSpec& cone,
                          const std::function<double(const std::vector<double>&)>& u,
                          const std::vector<int>& x, long long N, TruncationPolicy policy) {
    auto bundle = run_series(model, cone, x, N, nullptr, &u, policy);
    HarmonicSeries out;
    out.values = std::move(bundle.harmonic);
    if (N >= 2 && out.values[N] != 0.0)
        out.convergence = std::abs(out.values[N] - out.values[N / 2]) / out.values[N];
    return out;
}

BigInt excursion_count(const std::vector<std::vector<int>>& stepset, const ConeSpec& cone,
                       const std::vector<int>& x, const std::vector<int>& y, long long n) {
    StepDistribution m;
    m.dim = int(x.size());
    for (const auto& v : stepset) {
        Step s;
        s.v = v;
        s.prob = 1.0;
        m.steps.push_back(std::move(s));
    }
    LayerEngine<BigInt> eng(m, cone, x, TruncationPolicy::full(), Killing::Closed);
    for (long long i = 0; i < n; ++i) eng.advance();
    return eng.mass_at(y);
}

} // namespace cw::exact

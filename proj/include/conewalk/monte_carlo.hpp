#ifndef CONEWALK_MONTE_CARLO_HPP
#define CONEWALK_MONTE_CARLO_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "conewalk/cone.hpp"
#include "conewalk/reduite.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/walk_model.hpp"

namespace cw::mc {

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long samples = 0;
    uint64_t seed = 0;
    long long substream_count = 0;
    double censored_fraction = 0.0;
};

/// Evaluation frame for quantities that live in identity-covariance
/// coordinates (shrunken-cone membership, the reduite). The walk itself is
/// simulated on its lattice; positions are mapped through `transform` before
/// any geometric test against `cone_decor`.
struct EvalFrame {
    LinearTransform transform;
    ConeSpec cone_decor;

    static EvalFrame trivial(const ConeSpec& cone) {
        return {LinearTransform::identity(cone.dim()), cone};
    }
};

struct TailEstimate {
    double frequency = 0.0;
    double ci_low = 0.0;   // exact binomial (Clopper-Pearson), 95%
    double ci_high = 0.0;
    long long hits = 0;
    long long samples = 0;
    uint64_t seed = 0;
};

MCEstimate mc_survival(const StepDistribution& model, const ConeSpec& cone,
                       const std::vector<int>& x, long long n,
                       long long samples, uint64_t seed, int threads = 1);

/// E[u(y'_eps(n)/sqrt(n)); entered the shrunken cone before exiting].
/// The caller passes the reversed model. Horizon capped at n; censored paths
/// contribute zero and are reported in censored_fraction.
MCEstimate mc_boundary_functional(const StepDistribution& reversed_model,
                                  const ConeSpec& cone, const ReduiteFn& u,
                                  const EvalFrame& frame,
                                  const std::vector<int>& y, long long n, double epsilon,
                                  long long samples, uint64_t seed, int threads = 1);

/// Empirical P(t_{x,eps}(n) >= n^{1-eps}, tau_x >= n^{1-eps}).
TailEstimate mc_stopping_time_tail(const StepDistribution& model, const ConeSpec& cone,
                                   const EvalFrame& frame,
                                   const std::vector<int>& x, long long n, double epsilon,
                                   long long samples, uint64_t seed, int threads = 1);

struct FukNagaevResult {
    MCEstimate lhs;       // empirical P(|S(n)| > x, max |X(k)| <= y)
    double rhs = 0.0;     // 2d exp(x/(sqrt(d) y)) (sqrt(d) n/(x y))^{x/(sqrt(d) y)}
};

FukNagaevResult mc_fuk_nagaev(const StepDistribution& model,
                              double x_thresh, double y_thresh, long long n,
                              long long samples, uint64_t seed, int threads = 1);

double fuk_nagaev_bound(int d, double x_thresh, double y_thresh, long long n);

/// Truncated moment E[(S(x,n)^+)^alpha; S(x,n)^+ >= n^{1/2 - eps/8}] where
/// S(x,n)^+ is the running max of |S(l)| over surviving times l <= n^{1-eps}.
MCEstimate mc_max_displacement_moment(const StepDistribution& model, const ConeSpec& cone,
                                      const std::vector<int>& x, long long n, double epsilon,
                                      double alpha, long long samples, uint64_t seed,
                                      int threads = 1);

} // namespace cw::mc

#endif

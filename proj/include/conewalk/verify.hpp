#ifndef CONEWALK_VERIFY_HPP
#define CONEWALK_VERIFY_HPP

#include <cstdint>
#include <vector>

#include "conewalk/cone.hpp"
#include "conewalk/exact.hpp"
#include "conewalk/fitting.hpp"
#include "conewalk/monte_carlo.hpp"
#include "conewalk/reduite.hpp"
#include "conewalk/walk_model.hpp"

namespace cw::verify {

/// A (model, cone) pair resolved to identity-covariance coordinates: the DP
/// and MC run on the lattice, while every formula quantity (reduite, Gaussian
/// factor, shrunken cone) is evaluated through the decorrelating transform.
struct Geometry {
    StepDistribution model;
    ConeSpec cone_lattice;
    LinearTransform transform;   // lattice -> decorrelated
    ConeSpec cone_decor;
    ReduiteFn u;
    double p = 0.0;
    int period = 1;
    ModelReport report;

    double u_at(const std::vector<int>& z) const;
    double norm2_decor(const std::vector<int>& z) const; // |Mz|^2
    double dist_boundary_decor(const std::vector<int>& z) const;
};

Geometry make_geometry(const StepDistribution& model, const ConeSpec& cone_lattice);

struct ExponentCheck {
    FitResult fit;
    double expected_slope = 0.0;
    double tolerance = 0.0;
    int period = 1;
    int residue = 0;
    bool pass = false;
};

ExponentCheck verify_survival_exponent(const Geometry& g, const std::vector<int>& x,
                                       long long window_min, long long window_max,
                                       double tolerance,
                                       exact::TruncationPolicy policy = {});

/// Slope of log P(x+S(n)=x, tau_x>n) against -(p + d/2). With
/// unconstrained=true the run has no killing and the expected slope is -d/2.
ExponentCheck verify_llt_exponent(const Geometry& g, const std::vector<int>& x,
                                  long long window_min, long long window_max,
                                  double tolerance, bool unconstrained = false,
                                  exact::TruncationPolicy policy = {});

struct RegimeReport {
    double kappa_v_x = 0.0;      // kappa0 * V(x) (trimmed mean, rescaled)
    double ratio_spread = 0.0;   // max/min - 1 over the grid
    int grid_size = 0;
    int period_class = 0;
    long long n = 0;
};

/// Interior LLT: over lattice y in the shrunken cone with |My| <= A sqrt(n),
/// same residue class as x at time n, computes
/// R(y) = P(x,y,n) / (u(My) exp(-|My|^2/(2n))).
RegimeReport verify_interior_llt(const Geometry& g, const std::vector<int>& x,
                                 long long n, double A, double epsilon,
                                 exact::TruncationPolicy policy = {});

struct BoundaryPoint {
    std::vector<int> y;
    long long n = 0;
    double exact_prob = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
    double functional_mean = 0.0;
    double functional_se = 0.0;
    double censored_fraction = 0.0;
};

struct BoundaryReport {
    double kappa_v_x = 0.0;      // calibrated from the interior run
    std::vector<BoundaryPoint> points;
};

/// Boundary LLT for y = (1, m) with m the nearest admissible lattice value to
/// sqrt(n). kappa*V(x) is calibrated once from verify_interior_llt at
/// calibration_n.
BoundaryReport verify_boundary_llt(const Geometry& g, const std::vector<int>& x,
                                   const std::vector<long long>& n_list, double epsilon,
                                   long long mc_samples, uint64_t seed,
                                   long long calibration_n = 400,
                                   exact::TruncationPolicy policy = {}, int threads = 1);

struct HarmonicityReport {
    double max_defect = 0.0;        // max relative one-step defect of V ~ harmonic_V
    double convergence = 0.0;       // worst Cauchy diagnostic of the V estimates
    int points = 0;
};

HarmonicityReport verify_harmonicity_V(const Geometry& g,
                                       const std::vector<std::vector<int>>& points,
                                       long long N, exact::TruncationPolicy policy = {});

struct LowerBoundReport {
    double min_normalized = 0.0;                  // min over grid of n^{p/2} P(tau_z > n)
    std::vector<double> normalized;               // row-major: points x n_list
    std::vector<long long> n_list;
    bool ratios_stable = true;                    // consecutive-n ratio in [0.5, 2]
};

LowerBoundReport verify_uniform_lower_bound(const Geometry& g,
                                            const std::vector<std::vector<int>>& boundary_points,
                                            const std::vector<long long>& n_list,
                                            long long samples, uint64_t seed, int threads = 1);

/// Residue-aware series filter: keeps (n, v) with v > 0 and n in one residue
/// class mod q; throws if the positive support mixes residue classes.
std::vector<std::pair<long long, double>>
restrict_residue_class(const std::vector<std::pair<long long, double>>& series, int q,
                       int* residue_out = nullptr);

} // namespace cw::verify

#endif

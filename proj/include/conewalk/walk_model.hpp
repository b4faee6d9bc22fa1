#ifndef CONEWALK_WALK_MODEL_HPP
#define CONEWALK_WALK_MODEL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "conewalk/error.hpp"

namespace cw {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// One lattice increment with its probability. The rational value is
/// authoritative when `exact` is true; `prob` is always the double image.
struct Step {
    std::vector<int> v;
    double prob = 0.0;
    Rational prob_exact;
    bool exact = false;
};

/// Finite-support zero-mean lattice step law. Immutable after validation.
struct StepDistribution {
    int dim = 0;
    std::vector<Step> steps;

    int max_step_norm_inf() const;
    /// Largest Euclidean step norm.
    double max_step_norm2() const;
};

struct ModelReport {
    std::vector<double> mean;
    std::vector<std::vector<double>> covariance;
    int period = 1;
    // Hermite basis of the lattice generated by the support.
    std::vector<std::vector<long long>> sublattice_basis;
    // Index of the step-difference lattice in Z^d; this is the density
    // factor entering unconstrained local limit comparisons.
    long long reachable_lattice_index = 1;
    long long support_lattice_index = 1;
    bool aperiodic = false;
    bool moments_finite = true;
    bool reverse_reachability_hint = false;
};

struct LinearTransform {
    std::vector<std::vector<double>> matrix;
    std::vector<std::vector<double>> inverse;

    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> apply_inverse(const std::vector<double>& x) const;
    static LinearTransform identity(int d);
    bool is_scalar_multiple_of_identity(double* scale = nullptr) const;
};

/// Step law after decorrelation; support lives on a transformed (real) lattice.
struct RealStepDistribution {
    int dim = 0;
    std::vector<std::pair<std::vector<double>, double>> steps;
};

class ConeSpec; // cone_geometry

/// Checks zero drift, support dimensionality, and computes covariance,
/// period and lattice metadata. Drift and period use exact arithmetic when
/// every probability was given as a rational.
ModelReport validate_model(const StepDistribution& steps);

/// As validate_model, additionally filling the H6 hint for a concrete cone
/// (sufficient condition: some step lies in -K).
ModelReport validate_model(const StepDistribution& steps, const ConeSpec& cone);

/// Returns the transformed step law together with the transform M
/// satisfying M Q M^T = I.
std::pair<RealStepDistribution, LinearTransform> decorrelate(const StepDistribution& steps);

StepDistribution reverse(const StepDistribution& steps);

StepDistribution model_from_json(const std::string& json_text);
StepDistribution model_from_file(const std::string& path);
std::string model_to_json(const StepDistribution& steps);

std::vector<std::vector<double>> covariance_of(const StepDistribution& steps);

/// gcd of lengths of all support words returning to the origin, enumerated up
/// to the given word length (default 2*(d+2)).
int detect_period(const StepDistribution& steps, int max_word_len = 0);

} // namespace cw

#endif

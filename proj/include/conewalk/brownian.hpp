#ifndef CONEWALK_BROWNIAN_HPP
#define CONEWALK_BROWNIAN_HPP

#include <memory>
#include <vector>

#include "conewalk/cone.hpp"
#include "conewalk/reduite.hpp"

namespace cw::bm {

// Standard Brownian motion (variance t per coordinate), killed on the cone
// boundary. K_t is the Dirichlet heat kernel, k_t(x) = P(tau^bm_x > t).

double halfline_kernel(double x, double y, double t);
double halfline_survival(double x, double t);

double halfspace_kernel(const HalfSpace& hs, const std::vector<double>& x,
                        const std::vector<double>& y, double t);
double halfspace_survival(const HalfSpace& hs, const std::vector<double>& x, double t);

double orthant_kernel(const std::vector<double>& x, const std::vector<double>& y, double t);
double orthant_survival(const std::vector<double>& x, double t);

/// Eigenfunction series for the wedge of opening beta. The overall
/// normalization is calibrated at construction by requiring unit mass of
/// K_t(x0, .) for a deep interior point at small t, not taken from a formula.
class WedgeKernel {
public:
    explicit WedgeKernel(double beta, int terms = 200, double tolerance = 1e-12);

    double kernel_polar(double r, double theta, double rho, double phi, double t) const;
    double survival_polar(double r, double theta, double t) const;
    double normalization() const { return norm_; }

private:
    double series(double r, double theta, double rho, double phi, double t,
                  double* last_ratio) const;
    double survival_raw(double r, double theta, double t) const;
    double beta_;
    int terms_;
    double tol_;
    double norm_ = 1.0;
};

/// Catalog dispatch for K_t and k_t (HalfSpace, Orthant, Wedge2D).
class KernelEvaluator {
public:
    explicit KernelEvaluator(const ConeSpec& cone, int series_terms = 200,
                             double tolerance = 1e-12);

    double kernel(const std::vector<double>& x, const std::vector<double>& y, double t) const;
    double survival(const std::vector<double>& x, double t) const;
    const ConeSpec& cone() const { return cone_; }

private:
    ConeSpec cone_;
    int terms_;
    double tol_;
    std::shared_ptr<WedgeKernel> wedge_;
};

struct AsymptoticConstants {
    double chi = 0.0;   // k_t(x) ~ chi t^{-p/2} u(x)
    double chi0 = 0.0;  // K_t(x,y) ~ chi0 t^{-d/2-p} u(x) u(y) exp(-|y|^2/(2t))
    double t_min = 0.0;
    double t_max = 0.0;
    double fit_residual = 0.0;
};

AsymptoticConstants fit_asymptotic_constants(const ConeSpec& cone, const ReduiteFn& u);

struct BoundCheckReport {
    // per-t sample average of k_t(x) u(x_sqrt(t)) / u(x); min/max over the
    // t grid (two decades), so the spread measures stability in t
    double survival_ratio_min = 0.0, survival_ratio_max = 0.0;
    // same for K_t(x,y) sqrt(V V) / (k_t(x) k_t(y)), Gaussian factor removed
    double kernel_ratio_min = 0.0, kernel_ratio_max = 0.0;
    double fitted_c3 = 0.0;         // Gaussian decay rate used for the sandwich
    double ball_constant = 0.0;     // inf V(z, sqrt(t)) / t^{d/2}
    double scaling_ratio_min = 0.0; // Lemma-A.4 style k1(sx)/k1(x), s in [t,1]
    double scaling_ratio_max = 0.0;
    double holder_alpha = 0.0;      // fitted Holder exponent of k1
    double holder_constant = 0.0;
    int samples = 0;
};

BoundCheckReport check_gaussian_bounds(const ConeSpec& cone, int samples,
                                       unsigned long long seed = 987);

/// Volume of B(z, r) intersected with the cone (numeric; d <= 3).
double ball_cone_volume(const ConeSpec& cone, const std::vector<double>& z, double r);

/// A point x_t with |x_t - x| <= t and dist(x_t, dK) >= c0 t, moved toward
/// the cone's center ray when x is too close to the boundary.
std::vector<double> pick_xt(const ConeSpec& cone, const std::vector<double>& x, double t);

} // namespace cw::bm

#endif

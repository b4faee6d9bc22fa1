#ifndef CONEWALK_REDUITE_HPP
#define CONEWALK_REDUITE_HPP

#include <vector>

#include "conewalk/cone.hpp"

namespace cw {

/// Closed-form positive harmonic function of the cone, vanishing on the
/// boundary and homogeneous of degree p. Valid in identity-covariance
/// coordinates only.
class ReduiteFn {
public:
    ReduiteFn(ConeSpec cone, double p, double normalization = 1.0);

    double p() const { return p_; }
    double normalization() const { return norm_; }
    const ConeSpec& cone() const { return cone_; }

    /// Defined on the closed cone; zero on the boundary, possibly negative
    /// outside. Callers that need membership guard with cone().contains().
    double eval(const std::vector<double>& x) const;

    /// Analytic gradient; requires x in the open cone.
    std::vector<double> grad(const std::vector<double>& x) const;

private:
    ConeSpec cone_;
    double p_;
    double norm_;
};

/// Catalog lookup: HalfSpace, Wedge2D, Orthant, WeylChamberA.
/// Polyhedral cones have no closed form here (NoClosedForm).
ReduiteFn reduite_for(const ConeSpec& cone);

struct HarmonicCheck {
    double max_residual = 0.0;
    int points_checked = 0;
};

/// Finite-difference Laplacian residual max |L_h u| / (1+|u|) over sampled
/// interior points at distance > 10h from the boundary.
HarmonicCheck check_harmonic(const ReduiteFn& u, int samples, double h,
                             unsigned long long seed = 12345);

} // namespace cw

#endif

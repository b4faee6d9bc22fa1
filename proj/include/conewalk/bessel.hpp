#ifndef CONEWALK_BESSEL_HPP
#define CONEWALK_BESSEL_HPP

namespace cw {

/// exp(-x) * I_nu(x) for nu >= 0, x >= 0. Power series (all terms positive,
/// renormalized against overflow) for small argument or large order, scaled
/// asymptotic expansion for large argument.
double besseli_scaled(double nu, double x);

/// I_nu(x); overflows for large x, intended for moderate arguments and tests.
double besseli(double nu, double x);

} // namespace cw

#endif

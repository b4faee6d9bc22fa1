#include "conewalk/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace cw {

namespace {

// Power-series route: every term of I_nu is positive, so the sum is computed
// with a running rescale and the exponential shift applied at the end.
double series_scaled(double nu, double x) {
    const double q = 0.25 * x * x;
    double log0 = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    double term = 1.0, sum = 1.0, logscale = 0.0;
    for (int k = 0; k < 10000; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (term < 1e-18 * sum) break;
        if (sum > 1e280) {
            sum *= 1e-280;
            term *= 1e-280;
            logscale += 280.0 * std::log(10.0);
        }
    }
    return std::exp(log0 - x + logscale) * sum;
}

// Large-argument expansion of e^{-x} I_nu(x); valid once the terms decrease.
double asymptotic_scaled(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    double prev = std::abs(term);
    for (int k = 1; k <= 30; ++k) {
        term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        if (std::abs(term) > prev) break; // divergent tail reached
        prev = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

} // namespace

double besseli_scaled(double nu, double x) {
    if (nu < 0.0 || x < 0.0)
        throw std::domain_error("besseli_scaled requires nu >= 0, x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (x >= 30.0 && 4.0 * nu * nu < x) return asymptotic_scaled(nu, x);
    return series_scaled(nu, x);
}

double besseli(double nu, double x) {
    return std::exp(x) * besseli_scaled(nu, x);
}

} // namespace cw

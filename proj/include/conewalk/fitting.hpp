#ifndef CONEWALK_FITTING_HPP
#define CONEWALK_FITTING_HPP

#include <vector>

namespace cw {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    long long window_min = 0;
    long long window_max = 0;
    double residual_max = 0.0;
    int points = 0;
};

/// Least-squares slope of log(value) vs log(n) over [window_min, window_max].
/// Values must be strictly positive (NonPositiveValue otherwise). Pairs
/// outside the window are ignored.
FitResult fit_loglog(const std::vector<std::pair<long long, double>>& series,
                     long long window_min, long long window_max);

} // namespace cw

#endif

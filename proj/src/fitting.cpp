#include "conewalk/fitting.hpp"

#include <cmath>

#include "conewalk/error.hpp"

namespace cw {

FitResult fit_loglog(const std::vector<std::pair<long long, double>>& series,
                     long long window_min, long long window_max) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, v] : series) {
        if (n < window_min || n > window_max) continue;
        if (n <= 0)
            fail(ErrorCode::ConfigError, "log-log fit needs positive n");
        if (v <= 0.0)
            fail(ErrorCode::NonPositiveValue, "log-log fit needs positive values");
        pts.emplace_back(std::log(double(n)), std::log(v));
    }
    if (pts.size() < 2)
        fail(ErrorCode::EmptyGrid, "log-log fit needs at least two points in window");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [lx, ly] : pts) {
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double m = double(pts.size());
    const double denom = m * sxx - sx * sx;
    if (denom <= 0.0)
        fail(ErrorCode::FitDiverged, "degenerate abscissas in log-log fit");

    FitResult out;
    out.slope = (m * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / m;
    out.window_min = window_min;
    out.window_max = window_max;
    out.points = int(pts.size());

    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / m;
    for (auto [lx, ly] : pts) {
        double r = ly - (out.intercept + out.slope * lx);
        ss_res += r * r;
        ss_tot += (ly - ybar) * (ly - ybar);
        out.residual_max = std::max(out.residual_max, std::abs(r));
    }
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

} // namespace cw

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "conewalk/error.hpp"
#include "conewalk/fitting.hpp"

using namespace cw;

namespace {

std::vector<std::pair<long long, double>> power_series(double expo, double corr,
                                                       long long n_max) {
    std::vector<std::pair<long long, double>> s;
    for (long long n = 1; n <= n_max; ++n)
        s.emplace_back(n, std::pow(double(n), expo) * (1.0 + corr / double(n)));
    return s;
}

} // namespace

TEST_CASE("exact power law recovered to machine precision") {
    auto f = fit_loglog(power_series(-1.0, 0.0, 4096), 4, 4096);
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.residual_max < 1e-12);
}

TEST_CASE("slope with a 1/n correction stays inside the expected band") {
    auto f = fit_loglog(power_series(-1.0, 5.0, 4096), 256, 4096);
    CHECK(f.slope > -1.02);
    CHECK(f.slope < -1.0);
}

TEST_CASE("constant series has slope zero") {
    std::vector<std::pair<long long, double>> s;
    for (long long n = 1; n <= 100; ++n) s.emplace_back(n, 3.5);
    auto f = fit_loglog(s, 1, 100);
    CHECK(f.slope == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("window restricts the points used") {
    auto f = fit_loglog(power_series(-0.5, 0.0, 1000), 100, 200);
    CHECK(f.points == 101);
    CHECK(f.window_min == 100);
    CHECK(f.window_max == 200);
}

TEST_CASE("nonpositive values are rejected") {
    std::vector<std::pair<long long, double>> s = {{1, 1.0}, {2, 0.0}, {3, 0.5}};
    CHECK_THROWS_AS(fit_loglog(s, 1, 3), Error);
    std::vector<std::pair<long long, double>> s2 = {{1, 1.0}, {2, -0.5}};
    CHECK_THROWS_AS(fit_loglog(s2, 1, 2), Error);
}

TEST_CASE("empty or single-point windows are rejected") {
    auto s = power_series(-1.0, 0.0, 10);
    CHECK_THROWS_AS(fit_loglog(s, 100, 200), Error);
    CHECK_THROWS_AS(fit_loglog(s, 5, 5), Error);
}

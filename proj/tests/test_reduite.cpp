#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "conewalk/reduite.hpp"
#include "conewalk/rng.hpp"
#include "models.hpp"

using namespace cw;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("catalog exponents") {
    CHECK(reduite_for(ConeSpec(HalfSpace{{0.0, 1.0}})).p() == doctest::Approx(1.0));
    CHECK(reduite_for(ConeSpec(Wedge2D{pi / 2.0, 0.0})).p() == doctest::Approx(2.0));
    CHECK(reduite_for(ConeSpec(Wedge2D{pi / 3.0, 0.0})).p() == doctest::Approx(3.0));
    CHECK(reduite_for(ConeSpec(Orthant{2})).p() == doctest::Approx(2.0));
    CHECK(reduite_for(ConeSpec(Orthant{3})).p() == doctest::Approx(3.0));
    CHECK(reduite_for(ConeSpec(WeylChamberA{4})).p() == doctest::Approx(6.0));
}

TEST_CASE("catalog values") {
    auto orthant = reduite_for(ConeSpec(Orthant{2}));
    CHECK(orthant.eval({2.0, 3.0}) == doctest::Approx(6.0));

    auto hs = reduite_for(ConeSpec(HalfSpace{{0.6, 0.8}}));
    CHECK(hs.eval({1.0, 2.0}) == doctest::Approx(2.2));

    auto wc = reduite_for(ConeSpec(WeylChamberA{3}));
    CHECK(wc.eval({0.0, 1.0, 3.0}) == doctest::Approx(1.0 * 3.0 * 2.0));

    auto halfplane = reduite_for(ConeSpec(Wedge2D{pi, 0.0}));
    CHECK(halfplane.eval({0.0, 4.0}) == doctest::Approx(4.0)); // r sin(theta), p = 1
}

TEST_CASE("quadrant wedge formula is 2xy") {
    auto w = reduite_for(ConeSpec(Wedge2D{pi / 2.0, 0.0}));
    CounterRng rng(2024, 0);
    for (int i = 0; i < 100; ++i) {
        double x = 0.1 + 3.0 * rng.next_double();
        double y = 0.1 + 3.0 * rng.next_double();
        CHECK(w.eval({x, y}) == doctest::Approx(2.0 * x * y).epsilon(1e-10));
    }
}

TEST_CASE("boundary vanishing") {
    auto w = reduite_for(ConeSpec(Wedge2D{2.0 * pi / 3.0, 0.3}));
    CHECK(std::abs(w.eval({std::cos(0.3), std::sin(0.3)})) < 1e-10);
    double top = 0.3 + 2.0 * pi / 3.0;
    CHECK(std::abs(w.eval({2.0 * std::cos(top), 2.0 * std::sin(top)})) < 1e-10);

    auto o = reduite_for(ConeSpec(Orthant{3}));
    CHECK(o.eval({0.0, 1.0, 2.0}) == 0.0);

    auto wc = reduite_for(ConeSpec(WeylChamberA{3}));
    CHECK(wc.eval({1.0, 1.0, 2.0}) == 0.0);
}

TEST_CASE("gradients match central differences") {
    const double h = 1e-6;
    auto check_grad = [&](const ReduiteFn& u, std::vector<double> x) {
        auto g = u.grad(x);
        for (size_t i = 0; i < x.size(); ++i) {
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd = (u.eval(xp) - u.eval(xm)) / (2.0 * h);
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5));
        }
    };
    check_grad(reduite_for(ConeSpec(Wedge2D{pi / 2.0, 0.0})), {1.0, 1.0});
    check_grad(reduite_for(ConeSpec(Wedge2D{2.0 * pi / 3.0, 0.2})), {0.4, 1.3});
    check_grad(reduite_for(ConeSpec(Orthant{3})), {1.0, 2.0, 0.5});
    check_grad(reduite_for(ConeSpec(WeylChamberA{3})), {-1.0, 0.5, 2.0});
    check_grad(reduite_for(ConeSpec(HalfSpace{{0.6, 0.8}})), {1.0, 1.0});
}

TEST_CASE("wedge gradient closed form at (1,1)") {
    auto w = reduite_for(ConeSpec(Wedge2D{pi / 2.0, 0.0}));
    auto g = w.grad({1.0, 1.0}); // u = 2xy: grad (2y, 2x)
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("finite-difference harmonicity of the closed forms") {
    for (auto cone : {ConeSpec(Wedge2D{2.0 * pi / 3.0, 0.0}), ConeSpec(Orthant{2}),
                      ConeSpec(WeylChamberA{3})}) {
        auto u = reduite_for(cone);
        auto chk = check_harmonic(u, 100, 1e-3);
        CHECK(chk.points_checked == 100);
        CHECK(chk.max_residual < 1e-5);
    }
}

TEST_CASE("local Lipschitz growth of u") {
    // |u(y) - u(y')| <= C (1+|z|)^{p-1} |y - y'| near z, fitted C stays bounded
    auto u = reduite_for(ConeSpec(Orthant{2}));
    CounterRng rng(7, 0);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        double zx = 0.5 + 10.0 * rng.next_double();
        double zy = 0.5 + 10.0 * rng.next_double();
        double dx = (rng.next_double() - 0.5), dy = (rng.next_double() - 0.5);
        std::vector<double> a = {zx, zy}, b = {zx + dx, zy + dy};
        double dist = std::hypot(dx, dy);
        if (dist < 1e-9) continue;
        double znorm = std::hypot(zx, zy);
        double c = std::abs(u.eval(a) - u.eval(b)) / (dist * (1.0 + znorm));
        worst = std::max(worst, c);
    }
    CHECK(worst < 3.0);
}

TEST_CASE("polyhedral cones have no closed form") {
    ConeSpec p(Polyhedral{{{1.0, 0.0}, {0.0, 1.0}}});
    CHECK_THROWS_AS(reduite_for(p), Error);
}

TEST_CASE("gradient requires an interior point") {
    auto u = reduite_for(ConeSpec(Orthant{2}));
    CHECK_THROWS_AS(u.grad({0.0, 1.0}), Error);
}

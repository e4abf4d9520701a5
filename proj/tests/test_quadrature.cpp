#include "fslab/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace fslab;

TEST_CASE("power integral against antiderivatives") {
    CHECK(quad::power_integral(1.0, 2.0, 2.0) == Catch::Approx(7.0 / 3.0).epsilon(1e-14));
    CHECK(quad::power_integral(1.0, std::numbers::e, -1.0) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(quad::power_integral(0.0, 0.5, -0.5) == Catch::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-14));
    // near the log branch the expm1 form must stay smooth
    const double v1 = quad::power_integral(2.0, 5.0, -1.0 + 1e-13);
    const double v2 = quad::power_integral(2.0, 5.0, -1.0);
    CHECK(v1 == Catch::Approx(v2).epsilon(1e-10));
}

TEST_CASE("power integral additivity") {
    const double p = -1.7;
    const double whole = quad::power_integral(0.3, 2.1, p);
    const double split = quad::power_integral(0.3, 1.0, p) + quad::power_integral(1.0, 2.1, p);
    CHECK(whole == Catch::Approx(split).epsilon(1e-13));
}

TEST_CASE("cos-power integral endpoints and closed form") {
    for (double alpha : {0.3, 0.5, 1.0, 1.5}) {
        const double closed = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (1 + alpha)) /
                              (2.0 * std::tgamma(1.0 + 0.5 * alpha));
        CHECK(quad::cospow_halfpi(alpha) == Catch::Approx(closed).epsilon(1e-14));
        CHECK(quad::cospow_integral(alpha, std::numbers::pi / 2.0) ==
              Catch::Approx(closed).epsilon(1e-12));
        CHECK(quad::cospow_integral(alpha, 0.0) == 0.0);
    }
}

TEST_CASE("sin-power integral against a multiprecision oracle") {
    CHECK(quad::sinpow_integral(0.3, 0.7) == Catch::Approx(0.479138391963539469).epsilon(1e-12));
    CHECK(quad::sinpow_integral(1.5, 0.7) == Catch::Approx(0.153166395327036761).epsilon(1e-12));
    // both branch points of the cos-power integral against multiprecision values
    CHECK(quad::cospow_integral(0.4, std::numbers::pi / 4.0) ==
          Catch::Approx(0.75219501853602181).epsilon(1e-12));
    CHECK(quad::cospow_integral(0.4, 1.2) == Catch::Approx(1.07547094801048884).epsilon(1e-12));
    CHECK(quad::cospow_integral(0.4, 1.5) == Catch::Approx(1.23536595932997309).epsilon(1e-12));
    CHECK(quad::cospow_integral(1.1, 1.2) == Catch::Approx(0.912084894643955589).epsilon(1e-12));
    CHECK(quad::cospow_integral(1.1, 1.5) == Catch::Approx(0.968780710694706022).epsilon(1e-12));
}

TEST_CASE("cos-power integral for alpha = 1 is sin") {
    for (double th : {0.2, 0.7, 1.0, 1.4, 1.5607}) {
        CHECK(quad::cospow_integral(1.0, th) == Catch::Approx(std::sin(th)).epsilon(1e-12));
    }
}

#include "fslab/potential.hpp"
#include "fslab/spectral.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace fslab;

TEST_CASE("critical constants") {
    CHECK(critical_constant(PotentialKind::hardy_origin, 3, 1.0).value() ==
          Catch::Approx(2.0 / std::numbers::pi).epsilon(1e-13));
    CHECK(critical_constant(PotentialKind::hardy_boundary, 1, 1.0).value() ==
          Catch::Approx(1.0 / std::numbers::pi).epsilon(1e-13));
    // multiprecision Gamma oracle: sqrt(2) Gamma(3/8)^2 / Gamma(1/8)^2
    CHECK(critical_constant(PotentialKind::hardy_origin, 1, 0.5).value() ==
          Catch::Approx(0.13999967745248263087).epsilon(1e-13));
    CHECK_FALSE(critical_constant(PotentialKind::bounded_constant, 1, 0.5).has_value());
    CHECK_FALSE(critical_constant(PotentialKind::tabulated, 2, 1.0).has_value());
}

TEST_CASE("hardy potentials at cell centers") {
    const Grid g = build_interval(-1.0, 1.0, 4);
    PotentialSpec bdry{PotentialKind::hardy_boundary, 1.0, {}, {}};
    const Vector Vb = evaluate(bdry, g, 1.0);
    CHECK(Vb[3] == Catch::Approx(4.0).epsilon(1e-13));  // node at x = 0.75, delta = 1/4

    PotentialSpec orig{PotentialKind::hardy_origin, 1.0, {}, {}};
    const Vector Vo = evaluate(orig, g, 1.0);
    CHECK(Vo[0] == Catch::Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK(Vo[1] == Catch::Approx(4.0).epsilon(1e-13));
    CHECK(Vo[2] == Catch::Approx(4.0).epsilon(1e-13));
    CHECK(Vo[3] == Catch::Approx(4.0 / 3.0).epsilon(1e-13));

    PotentialSpec flat{PotentialKind::bounded_constant, 5.0, {}, {}};
    CHECK(evaluate(flat, g, 1.0).isApproxToConstant(5.0));
}

TEST_CASE("hardy_origin requires the origin inside the domain") {
    const Grid g = build_interval(1.0, 2.0, 8);
    PotentialSpec orig{PotentialKind::hardy_origin, 1.0, {}, {}};
    CHECK_THROWS_AS(evaluate(orig, g, 0.5), ConfigError);
}

TEST_CASE("origin on a node uses the radial cell average") {
    const Grid g = build_interval(-1.0, 1.0, 5);  // odd n puts a node at 0
    PotentialSpec orig{PotentialKind::hardy_origin, 1.0, {}, {}};
    const double alpha = 0.5;
    const Vector V = evaluate(orig, g, alpha);
    // cell average of |x|^-1/2 over (-h/2, h/2) = (h/2)^-1/2 / (1 - 1/2)
    const double expect = std::pow(0.5 * g.h, -alpha) / (1.0 - alpha);
    CHECK(V[2] == Catch::Approx(expect).epsilon(1e-13));
    CHECK_THROWS_AS(evaluate(orig, g, 1.5), ConfigError);  // not cell-integrable
}

TEST_CASE("tabulated potentials validate against the grid") {
    const Grid g = build_interval(0.0, 1.0, 6);
    PotentialSpec tab{PotentialKind::tabulated, 0.0, {}, Vector::Constant(6, 2.0)};
    CHECK(evaluate(tab, g, 0.5).isApproxToConstant(2.0));
    tab.tabulated = Vector::Constant(5, 2.0);
    CHECK_THROWS_AS(evaluate(tab, g, 0.5), ConfigError);
    tab.tabulated = Vector::Constant(6, -1.0);
    CHECK_THROWS_AS(evaluate(tab, g, 0.5), ConfigError);
}

TEST_CASE("truncation operations") {
    Vector V(4);
    V << 4.0 / 3.0, 4.0, 4.0, 4.0 / 3.0;
    const Vector Vt = truncate(V, 2.0);
    CHECK(Vt[0] == Catch::Approx(4.0 / 3.0));
    CHECK(Vt[1] == 2.0);
    CHECK(Vt[2] == 2.0);
    CHECK(truncate(V, 5.0) == V);
    CHECK_THROWS_AS(truncate(V, 0.0), ConfigError);
    // monotone upward to V
    Vector prev = truncate(V, 0.5);
    for (double k : {1.0, 2.0, 3.0, 5.0}) {
        const Vector cur = truncate(V, k);
        CHECK((cur - prev).minCoeff() >= 0.0);
        prev = cur;
    }

    CHECK(fractional_truncate(V, 2) == 0.5 * V);
    CHECK(fractional_truncate(Vector::Constant(1, 4.0), 10)[0] == Catch::Approx(3.6));
    CHECK_THROWS_AS(fractional_truncate(V, 1), ConfigError);
    prev = fractional_truncate(V, 2);
    for (int k : {3, 5, 9, 33}) {
        const Vector cur = fractional_truncate(V, k);
        CHECK((cur - prev).minCoeff() >= 0.0);
        prev = cur;
    }
}

TEST_CASE("relative bound basics") {
    const Grid g = build_interval(-1.0, 1.0, 60);
    const NonlocalForm form = assemble(g, 0.5);
    CHECK(relative_bound(form, Vector::Zero(g.size())) == 0.0);

    ProbeRng rng(3);
    const Vector V0 = rng.positive(g.size());
    const double k1 = relative_bound(form, V0);
    CHECK(relative_bound(form, 3.0 * V0) == Catch::Approx(3.0 * k1).epsilon(1e-11));

    // monotone in the potential
    const Vector V1 = V0 + rng.positive(g.size());
    CHECK(relative_bound(form, V1) >= k1 * (1.0 - 1e-12));

    CHECK_THROWS_AS(relative_bound(form, Vector::Constant(g.size(), -1.0)), NumericalError);
}

TEST_CASE("relative bound of a bounded constant is c / lambda0") {
    const Grid g = build_interval(-1.0, 1.0, 80);
    const NonlocalForm form = assemble(g, 0.5);
    const SpectralResult spec = eigensolve(form, Vector::Zero(g.size()), 2);
    const double c = 0.37;
    CHECK(relative_bound(form, Vector::Constant(g.size(), c)) ==
          Catch::Approx(c / spec.lambda0()).epsilon(1e-10));
}

TEST_CASE("hardy relative bound stays subcritical below the critical constant") {
    const double alpha = 0.5;
    const double cstar = critical_constant(PotentialKind::hardy_origin, 1, alpha).value();
    for (int n : {100, 200, 400}) {
        const Grid g = build_interval(-1.0, 1.0, n);
        const NonlocalForm form = assemble(g, alpha);
        PotentialSpec spec{PotentialKind::hardy_origin, 0.5 * cstar, {}, {}};
        const double kap = relative_bound(form, evaluate(spec, g, alpha));
        CHECK(kap < 1.0);
        CHECK(kap > 0.0);
    }
    // monotone in c, and still below 1 at c = c* on this grid
    const Grid g = build_interval(-1.0, 1.0, 400);
    const NonlocalForm form = assemble(g, alpha);
    double last = 0.0;
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
        PotentialSpec spec{PotentialKind::hardy_origin, frac * cstar, {}, {}};
        const double kap = relative_bound(form, evaluate(spec, g, alpha));
        CHECK(kap > last);
        last = kap;
    }
    CHECK(last < 1.0);
}

TEST_CASE("critical fraction metadata") {
    PotentialSpec spec{PotentialKind::hardy_origin, 0.07, {}, {}};
    const double cstar = 0.13999967745248263087;
    CHECK(spec.critical_fraction(1, 0.5).value() == Catch::Approx(0.07 / cstar).epsilon(1e-12));
    PotentialSpec flat{PotentialKind::bounded_constant, 1.0, {}, {}};
    CHECK_FALSE(flat.critical_fraction(1, 0.5).has_value());
}

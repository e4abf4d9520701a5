#include "fslab/spectral.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace fslab;

namespace {

struct FreeProblem {
    Grid grid;
    NonlocalForm form;
    SpectralResult spec;
};

const FreeProblem& interval_alpha1_n400() {
    static const FreeProblem p = [] {
        FreeProblem q;
        q.grid = build_interval(-1.0, 1.0, 400);
        q.form = assemble(q.grid, 1.0);
        q.spec = eigensolve(q.form, Vector::Zero(q.grid.size()), q.grid.size());
        return q;
    }();
    return p;
}

}  // namespace

TEST_CASE("free ground state on the interval, alpha = 1") {
    const auto& p = interval_alpha1_n400();
    const double asymptotic = std::pow(std::numbers::pi / 2.0 - std::numbers::pi / 8.0, 1.0);
    CHECK(std::abs(p.spec.lambda0() - asymptotic) / asymptotic < 0.03);
    CHECK(p.spec.lambda0_simple);
    CHECK_FALSE(p.spec.indefinite);
    CHECK(p.spec.ground_state().minCoeff() > 0.0);
    for (Index k = 0; k < 5; ++k) {
        const double nrm = p.spec.eigenvectors.col(k).cwiseAbs2().dot(p.grid.measure);
        CHECK(nrm == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("bounded constant potential shifts the spectrum exactly") {
    const Grid g = build_interval(-1.0, 1.0, 100);
    const NonlocalForm form = assemble(g, 0.5);
    const SpectralResult base = eigensolve(form, Vector::Zero(g.size()), 6);
    const double c = 0.3 * base.lambda0();
    const SpectralResult shifted = eigensolve(form, Vector::Constant(g.size(), c), 6);
    for (Index k = 0; k < 6; ++k)
        CHECK(shifted.eigenvalues[k] == Catch::Approx(base.eigenvalues[k] - c).epsilon(1e-10));
    CHECK(std::abs(shifted.ground_state().dot(
              g.measure.cwiseProduct(base.ground_state()))) == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("attractive potential lowers the ground energy") {
    const Grid g = build_interval(-1.0, 1.0, 100);
    const double alpha = 0.5;
    const NonlocalForm form = assemble(g, alpha);
    const double cstar = critical_constant(PotentialKind::hardy_origin, 1, alpha).value();
    PotentialSpec spec{PotentialKind::hardy_origin, 0.5 * cstar, {}, {}};
    const SpectralResult base = eigensolve(form, Vector::Zero(g.size()), 2);
    const SpectralResult pert = eigensolve(form, evaluate(spec, g, alpha), 2);
    CHECK(pert.lambda0() < base.lambda0());
    CHECK(pert.ground_state().minCoeff() > 0.0);
}

TEST_CASE("eigensolve refuses supercritical potentials without the critical flag") {
    const Grid g = build_interval(-1.0, 1.0, 60);
    const NonlocalForm form = assemble(g, 0.5);
    const SpectralResult base = eigensolve(form, Vector::Zero(g.size()), 2);
    const Vector V = Vector::Constant(g.size(), 1.2 * base.lambda0());
    CHECK_THROWS_AS(eigensolve(form, V, 2), NumericalError);
    const SpectralResult forced = eigensolve(form, V, 2, true);
    CHECK(forced.indefinite);  // lambda0 - c < 0 is reported, not fatal
}

TEST_CASE("torsion function matches the interval closed form") {
    const auto& p = interval_alpha1_n400();
    const Vector xi = torsion(p.form, Vector::Zero(p.grid.size()));
    double err2 = 0.0;
    for (Index i = 0; i < p.grid.size(); ++i) {
        const double exact = std::sqrt(1.0 - p.grid.x1[i] * p.grid.x1[i]);
        err2 += p.grid.measure[i] * (xi[i] - exact) * (xi[i] - exact);
    }
    CHECK(std::sqrt(err2) <= 0.01);
    CHECK(xi.minCoeff() > 0.0);
    // center value of the closed-form torsion is 1
    CHECK(std::abs(xi[p.grid.center_node()] - 1.0) <= 0.01);
}

TEST_CASE("torsion pairing identity") {
    const Grid g = build_interval(-1.0, 1.0, 80);
    const double alpha = 0.5;
    const NonlocalForm form = assemble(g, alpha);
    const double cstar = critical_constant(PotentialKind::hardy_origin, 1, alpha).value();
    PotentialSpec spec{PotentialKind::hardy_origin, 0.5 * cstar, {}, {}};
    const Vector V = evaluate(spec, g, alpha);
    const Vector xi = torsion(form, V);
    const double ev = form.energy(xi) - g.measure.cwiseProduct(V).dot(xi.cwiseAbs2());
    CHECK(ev == Catch::Approx(g.measure.dot(xi)).epsilon(1e-11));
}

TEST_CASE("torsion scales as 2^alpha under domain doubling") {
    const double alpha = 0.7;
    const Grid g1 = build_interval(-1.0, 1.0, 64);
    const Grid g2 = build_interval(-2.0, 2.0, 64);
    const Vector xi1 = torsion(assemble(g1, alpha), Vector::Zero(64));
    const Vector xi2 = torsion(assemble(g2, alpha), Vector::Zero(64));
    for (Index i = 0; i < 64; ++i)
        CHECK(xi2[i] == Catch::Approx(std::pow(2.0, alpha) * xi1[i]).epsilon(1e-10));
}

TEST_CASE("green matrix identities and domination") {
    const Grid g = build_interval(-1.0, 1.0, 100);
    const double alpha = 0.5;
    const NonlocalForm form = assemble(g, alpha);
    const Index N = g.size();

    const SpectralResult free_spec = eigensolve(form, Vector::Zero(N), N);
    const GreenData free_green = green_matrix(form, Vector::Zero(N), free_spec);
    CHECK(free_green.C_G > 0.0);
    CHECK(free_green.C_H > 0.0);

    // inverse identity
    const Matrix resid =
        free_green.green * form.form_matrix - Matrix::Identity(N, N);
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-8);

    // torsion consistency
    const Vector xi = torsion(form, Vector::Zero(N));
    CHECK((free_green.torsion - xi).cwiseAbs().maxCoeff() < 1e-10);

    // entrywise domination for V >= 0
    const double cstar = critical_constant(PotentialKind::hardy_origin, 1, alpha).value();
    PotentialSpec pspec{PotentialKind::hardy_origin, 0.5 * cstar, {}, {}};
    const Vector V = evaluate(pspec, g, alpha);
    const SpectralResult v_spec = eigensolve(form, V, N);
    const GreenData v_green = green_matrix(form, V, v_spec);
    CHECK(((v_green.green - free_green.green).array() >= -1e-12).all());

    // torsion lower bound through the Green kernel constant
    const Vector phi0 = free_spec.ground_state();
    const double mass = g.measure.dot(phi0);
    for (Index i = 0; i < N; ++i)
        CHECK(free_green.torsion[i] >= free_green.C_G * phi0[i] * mass * (1.0 - 1e-12));
}

TEST_CASE("green matrix refuses a nearly singular pencil") {
    const Grid g = build_interval(-1.0, 1.0, 40);
    const NonlocalForm form = assemble(g, 0.5);
    const SpectralResult base = eigensolve(form, Vector::Zero(g.size()), 2);
    const Vector V = Vector::Constant(g.size(), base.lambda0() - 1e-9);
    const SpectralResult close = eigensolve(form, V, 2, true);
    CHECK_THROWS_AS(green_matrix(form, V, close), NumericalError);
}

TEST_CASE("ground state representation residual is at solver accuracy") {
    const Grid g = build_interval(-1.0, 1.0, 100);
    const double alpha = 0.5;
    const NonlocalForm form = assemble(g, alpha);
    const Index N = g.size();
    const SpectralResult free_spec = eigensolve(form, Vector::Zero(N), N);
    const GreenData free_green = green_matrix(form, Vector::Zero(N), free_spec);

    CHECK(ground_state_representation_residual(form, Vector::Zero(N), free_spec, free_green) <
          1e-8);

    const SpectralResult cs = eigensolve(form, Vector::Constant(N, 0.2), N, true);
    CHECK(ground_state_representation_residual(form, Vector::Constant(N, 0.2), cs, free_green) <
          1e-8);

    const double cstar = critical_constant(PotentialKind::hardy_origin, 1, alpha).value();
    PotentialSpec pspec{PotentialKind::hardy_origin, 0.5 * cstar, {}, {}};
    const Vector V = evaluate(pspec, g, alpha);
    const SpectralResult vs = eigensolve(form, V, N);
    CHECK(ground_state_representation_residual(form, V, vs, free_green) < 1e-8);
}

TEST_CASE("heat kernel semigroup law and sub-Markov rows") {
    const auto& p = interval_alpha1_n400();
    const Vector& m = p.grid.measure;
    const Matrix pt = heat_kernel(p.spec, 0.7);
    const Matrix ps = heat_kernel(p.spec, 0.4);
    const Matrix pts = heat_kernel(p.spec, 1.1);
    const Matrix comp = pt * m.asDiagonal() * ps;
    CHECK((comp - pts).cwiseAbs().maxCoeff() < 1e-8);

    CHECK(((pt * m).array() <= 1.0 + 1e-12).all());
    const Vector rows_small = heat_kernel(p.spec, 1e-3) * m;
    for (Index i = 0; i < p.grid.size(); ++i)
        if (p.grid.boundary_distance[i] >= 0.2) CHECK(rows_small[i] > 0.99);
}

TEST_CASE("heat kernel truncation control") {
    const Grid g = build_interval(-1.0, 1.0, 80);
    const NonlocalForm form = assemble(g, 0.5);
    const SpectralResult few = eigensolve(form, Vector::Zero(g.size()), 10);
    CHECK_THROWS_AS(heat_kernel(few, 1e-4), NumericalError);
    CHECK_NOTHROW(heat_kernel(few, 40.0 / few.lambda0()));
    CHECK_THROWS_AS(heat_kernel(few, 0.0), NumericalError);
}

TEST_CASE("intrinsic ratio straddles one and tightens like the spectral gap") {
    const auto& p = interval_alpha1_n400();
    const double gap = p.spec.gap();
    const double t = 2.0 / gap;
    const Vector phi0 = p.spec.ground_state();

    const auto [lo1, hi1] = iuc_ratio(heat_kernel(p.spec, t), phi0, p.spec.lambda0(), t);
    CHECK(lo1 <= 1.0 + 1e-12);
    CHECK(hi1 >= 1.0 - 1e-12);

    // remainder bound from the spectral expansion
    double r1 = 0.0;
    for (Index k = 1; k < p.spec.stored(); ++k) {
        const double sup = p.spec.eigenvectors.col(k).cwiseAbs().maxCoeff();
        r1 += sup * sup;
    }
    r1 /= std::pow(phi0.minCoeff(), 2);
    CHECK(std::max(hi1 - 1.0, 1.0 - lo1) <= std::exp(-gap * t) * r1);

    const auto [lo2, hi2] = iuc_ratio(heat_kernel(p.spec, 2.0 * t), phi0, p.spec.lambda0(), 2.0 * t);
    const double shrink = (hi2 - lo2) / (hi1 - lo1);
    const double predicted = std::exp(-gap * t);
    CHECK(shrink >= 0.5 * predicted);
    CHECK(shrink <= 2.0 * predicted);
}

TEST_CASE("ground energy recovered from the large-time heat kernel") {
    const auto& p = interval_alpha1_n400();
    const Vector xi = torsion(p.form, Vector::Zero(p.grid.size()));
    const auto [i0, j0] = center_pair(p.grid);
    CHECK(((i0 == 199 && j0 == 200) || (i0 == 200 && j0 == 199)));

    const double lam0 = p.spec.lambda0();
    const double t30 = 30.0 / lam0;
    const double est30 = lambda_from_heat(heat_kernel(p.spec, t30), xi, t30, i0, j0);
    CHECK(std::abs(est30 - lam0) <= 1e-2);

    const double t60 = 60.0 / lam0;
    const double est60 = lambda_from_heat(heat_kernel(p.spec, t60), xi, t60, i0, j0);
    CHECK(std::abs(est60 - lam0) <= std::abs(est30 - lam0));

    // swapping the normalizer changes the estimate by an explicit node-wise term
    const Vector phi0 = p.spec.ground_state();
    const double est_phi = lambda_from_heat(heat_kernel(p.spec, t30), phi0, t30, i0, j0);
    const double algebra = std::log((xi[i0] * xi[j0]) / (phi0[i0] * phi0[j0])) / t30;
    CHECK(est_phi - est30 == Catch::Approx(algebra).margin(1e-12));

    CHECK_THROWS_AS(lambda_from_heat(heat_kernel(p.spec, 1e5), xi, 1e5, i0, j0), NumericalError);
}

TEST_CASE("boundary lower bound of the ground state is refinement-stable") {
    const double alpha = 0.5;
    double vals[2];
    int idx = 0;
    for (int n : {200, 400}) {
        const Grid g = build_interval(-1.0, 1.0, n);
        const NonlocalForm form = assemble(g, alpha);
        const SpectralResult spec = eigensolve(form, Vector::Zero(g.size()), 2);
        const Vector ratio = spec.ground_state().cwiseQuotient(
            g.boundary_distance.array().pow(0.5 * alpha).matrix());
        vals[idx++] = ratio.minCoeff();
        CHECK(ratio.minCoeff() > 0.0);
    }
    CHECK(std::abs(vals[0] - vals[1]) / vals[0] <= 0.25);
}

TEST_CASE("hardy inequality from the computed constant is a valid regression") {
    const Grid g = build_interval(-1.0, 1.0, 100);
    const NonlocalForm form = assemble(g, 0.5);
    const Index N = g.size();
    const SpectralResult spec = eigensolve(form, Vector::Zero(N), N);
    const GreenData green = green_matrix(form, Vector::Zero(N), spec);
    const Vector phi0 = spec.ground_state();
    ProbeRng rng(21);
    for (int t = 0; t < 100; ++t) {
        const Vector f = rng.gaussian(N);
        const double lhs = g.measure.cwiseQuotient(phi0.cwiseAbs2()).dot(f.cwiseAbs2());
        CHECK(lhs <= green.C_H * form.energy(f) * (1.0 + 1e-11));
    }
    // distance-weighted Hardy constant is finite and positive (reported quantity)
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
        Matrix(g.measure.cwiseQuotient(g.boundary_distance.array().pow(0.5).matrix())
                   .asDiagonal()),
        form.form_matrix);
    CHECK(es.eigenvalues().maxCoeff() > 0.0);
    CHECK(std::isfinite(es.eigenvalues().maxCoeff()));
}

TEST_CASE("free-case Green constant is positive on every tested grid") {
    for (double alpha : {0.5, 1.0}) {
        for (int n : {50, 100}) {
            const Grid g = build_interval(-1.0, 1.0, n);
            const NonlocalForm form = assemble(g, alpha);
            const SpectralResult spec = eigensolve(form, Vector::Zero(g.size()), 2);
            const GreenData green = green_matrix(form, Vector::Zero(g.size()), spec);
            CHECK(green.C_G > 0.0);
        }
    }
}

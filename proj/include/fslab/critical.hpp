#ifndef FSLAB_CRITICAL_HPP
#define FSLAB_CRITICAL_HPP

#include "fslab/doob.hpp"

#include <cmath>
#include <vector>

namespace fslab {

/// Monotone truncation ladder V_k = (1 - 1/k) V_* toward a critical potential.
/// Each rung is a plain subcritical solve; the critical operator is only ever
/// reached as the k -> infinity limit, extrapolated linearly in 1/k.
struct CriticalLadder {
    std::vector<int> rungs;              // k values actually run
    std::vector<double> lambda0;         // per-rung ground energies
    std::vector<double> kappa;           // per-rung relative bounds
    std::vector<double> phi_step;        // ||phi_k - phi_{k+1}||_{L2(m)}, aligned with rungs[1:]
    std::vector<double> w_lower_const;   // per-rung C0^(k) = C_G lambda0^(k) sum m phi0 phi^(k)
    Matrix tail_phi, tail_xi;            // last <=5 rung vectors, for extrapolation
    Vector phi_star, xi_star;            // extrapolated limits (phi_star renormalized)
    double lambda_star = 0.0;
    double fit_residual = 0.0;           // rms residual of the 1/k fit
    bool complete = false;               // false when a rung hit kappa >= 1
    Vector last_phi, last_xi;
    double last_lambda0 = 0.0;
    int last_k = 0;
};

inline CriticalLadder run_ladder(const NonlocalForm& form, const Vector& V_star, int k_max,
                                 const SpectralResult& free_spec, const GreenData& free_green) {
    if (k_max < 6) throw ConfigError("run_ladder: k_max must be at least 6");
    if (V_star.minCoeff() < 0) throw ConfigError("run_ladder: potential must be nonnegative");
    CriticalLadder lad;
    const Vector& m = form.grid.measure;
    const Vector phi0_free = free_spec.ground_state();
    std::vector<Vector> phis, xis;
    for (int k = 2; k <= k_max; ++k) {
        const Vector Vk = fractional_truncate(V_star, k);
        const double kap = relative_bound(form, Vk);
        if (kap >= 1.0) break;  // stop at the previous rung, report partial
        const SpectralResult spec = eigensolve(form, Vk, 2, true);
        const Vector xi = torsion(form, Vk);
        lad.rungs.push_back(k);
        lad.kappa.push_back(kap);
        lad.lambda0.push_back(spec.lambda0());
        lad.w_lower_const.push_back(free_green.C_G * spec.lambda0() *
                                    m.cwiseProduct(phi0_free).dot(spec.ground_state()));
        phis.push_back(spec.ground_state());
        xis.push_back(xi);
        if (phis.size() >= 2) {
            const Vector d = phis[phis.size() - 2] - phis.back();
            lad.phi_step.push_back(std::sqrt(d.cwiseAbs2().dot(m)));
        }
    }
    lad.complete = !lad.rungs.empty() && lad.rungs.back() == k_max;
    if (lad.rungs.size() < 5)
        throw NumericalError("run_ladder: fewer than 5 subcritical rungs; potential too strong "
                             "for this grid");

    // linear fit lambda0(k) = lambda* + a/k over the last five rungs
    const std::size_t nfit = 5;
    const std::size_t off = lad.rungs.size() - nfit;
    Eigen::Matrix<double, Eigen::Dynamic, 2> X(nfit, 2);
    Vector y(nfit);
    for (std::size_t i = 0; i < nfit; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = 1.0 / lad.rungs[off + i];
        y[i] = lad.lambda0[off + i];
    }
    const Eigen::Vector2d coef = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    lad.lambda_star = coef[0];
    lad.fit_residual = std::sqrt((X * coef - y).squaredNorm() / nfit);

    const Index N = form.grid.size();
    lad.tail_phi.resize(N, nfit);
    lad.tail_xi.resize(N, nfit);
    for (std::size_t i = 0; i < nfit; ++i) {
        lad.tail_phi.col(i) = phis[off + i];
        lad.tail_xi.col(i) = xis[off + i];
    }
    // per-node extrapolation with the same design matrix
    const Eigen::Matrix2d G = (X.transpose() * X).inverse();
    const Eigen::Matrix<double, 2, Eigen::Dynamic> proj = G * X.transpose();
    lad.phi_star = (lad.tail_phi * proj.row(0).transpose()).eval();
    lad.xi_star = (lad.tail_xi * proj.row(0).transpose()).eval();
    lad.phi_star /= std::sqrt(lad.phi_star.cwiseAbs2().dot(m));
    if (lad.phi_star[0] < 0) lad.phi_star = -lad.phi_star;

    lad.last_phi = phis.back();
    lad.last_xi = xis.back();
    lad.last_lambda0 = lad.lambda0.back();
    lad.last_k = lad.rungs.back();
    return lad;
}

/// Sign preservation of L_{V_k}^{-1}: solve (E - diag(m V)) f = m F for F >= 0
/// and return min_i f_i (contract: >= -1e-8 max f).
inline double sign_preservation_check(const NonlocalForm& form, const Vector& V,
                                      const Vector& F) {
    if (F.minCoeff() < 0) throw NumericalError("sign_preservation_check: F must be >= 0");
    Matrix P = form.form_matrix - Matrix(form.grid.measure.cwiseProduct(V).asDiagonal());
    Eigen::LDLT<Matrix> ldlt(P);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw NumericalError("sign_preservation_check: pencil not positive definite");
    const Vector f = ldlt.solve(form.grid.measure.cwiseProduct(F));
    return f.minCoeff();
}

/// Both readings of the critical ground-state lower bound
///   phi*(x) >= ( C_G lambda* int phi0^p phi* ) phi0(x)^p
/// with p = alpha/2 as printed and p = 1 as in the Green-kernel chain.
/// Reports the per-node satisfaction fraction for each reading.
struct LowerBoundReport {
    double exponent_half_alpha_fraction = 0.0;
    double exponent_one_fraction = 0.0;
    double constant_half_alpha = 0.0;
    double constant_one = 0.0;
};

inline LowerBoundReport critical_lower_bound_check(const CriticalLadder& lad,
                                                   const SpectralResult& free_spec,
                                                   double C_G, const Vector& m, double alpha) {
    LowerBoundReport rep;
    const Vector phi0 = free_spec.ground_state();
    auto evaluate = [&](double p, double& constant) {
        const Vector phi0p = phi0.array().pow(p);
        constant = C_G * lad.lambda_star * m.cwiseProduct(phi0p).dot(lad.phi_star);
        Index ok = 0;
        for (Index i = 0; i < phi0.size(); ++i)
            if (lad.phi_star[i] >= constant * phi0p[i] * (1.0 - 1e-12)) ++ok;
        return double(ok) / double(phi0.size());
    };
    rep.exponent_half_alpha_fraction = evaluate(0.5 * alpha, rep.constant_half_alpha);
    rep.exponent_one_fraction = evaluate(1.0, rep.constant_one);
    return rep;
}

/// Sharp two-sided comparison at the ladder limit:
///   (A C C1^2 inf_t t^{-s} e^{2 t lambda*} + 1)^{-1} xi* <= phi* <= C1 inf_t t^{-s/2} e^{t lambda*} xi*.
/// r is a free parameter in (1, d/(d-alpha)) at criticality; callers pass their choice.
struct SharpComparisonReport {
    double r = 0.0, s = 0.0;
    double upper_env = 0.0, upper_env_t = 0.0;
    double lower_env = 0.0, lower_env_t = 0.0;  // the full prefactor (A C C1^2 ... + 1)
    double ratio_max = 0.0, ratio_min = 0.0;    // extremes of phi*/xi*
    bool upper_flag = false, lower_flag = false;
};

inline SharpComparisonReport critical_sharp_comparison(const CriticalLadder& lad, double A_const,
                                                       double C_const, double C1, double s_exp,
                                                       double r_param) {
    SharpComparisonReport rep;
    rep.r = r_param;
    rep.s = s_exp;
    const Vector ratio = lad.phi_star.cwiseQuotient(lad.xi_star);
    rep.ratio_max = ratio.maxCoeff();
    rep.ratio_min = ratio.minCoeff();
    const double lam = lad.lambda_star;
    auto upper = [&](double t) { return C1 * std::pow(t, -0.5 * s_exp) * std::exp(t * lam); };
    auto lower = [&](double t) {
        return A_const * C_const * C1 * C1 * std::pow(t, -s_exp) * std::exp(2.0 * t * lam) + 1.0;
    };
    std::tie(rep.upper_env, rep.upper_env_t) = minimize_over_t(upper, 1e-3 / lam, 1e3 / lam);
    std::tie(rep.lower_env, rep.lower_env_t) = minimize_over_t(lower, 1e-3 / lam, 1e3 / lam);
    rep.upper_flag = rep.ratio_max <= rep.upper_env;
    rep.lower_flag = rep.ratio_min >= 1.0 / rep.lower_env;
    return rep;
}

}  // namespace fslab

#endif

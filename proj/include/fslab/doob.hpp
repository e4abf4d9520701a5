#ifndef FSLAB_DOOB_HPP
#define FSLAB_DOOB_HPP

#include "fslab/spectral.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace fslab {

/// w-transform of L_V - S by a positive solution w of L_V w = S w + F:
///   Q^w[f] = (A/2) sum_{i!=j} (f_i - f_j)^2 K_ij w_i w_j + sum_i m_i F_i w_i f_i^2,
/// a Dirichlet form on L2(w^2 m). The conjugation identity
///   Q^w[f] + sum_i m_i S_i w_i^2 f_i^2 = E_V[w f]
/// holds exactly because w solves the discrete equation; build_doob verifies it
/// on a random probe sweep and refuses weights that are not solutions.
struct DoobForm {
    double alpha = 0.0;
    double norm_const = 0.0;
    Vector measure;          // base cell measures m
    Vector w, S, F;
    Vector weighted_measure; // w^2 m
    Vector zero_order;       // m_i F_i w_i
    Matrix form_matrix;      // E^w with f' E^w f = Q^w[f]
    double conjugation_residual = 0.0;

    double energy(const Vector& f) const { return f.dot(form_matrix * f); }

    double interaction_energy(const Vector& f) const {
        return energy(f) - zero_order.dot(f.cwiseAbs2());
    }
};

/// Solve (E - diag(mV) - diag(mS)) w = m F. The shifted pencil must be positive
/// definite; otherwise the smallest eigenvalue is reported and the solve refused.
inline Vector solve_w(const NonlocalForm& form, const Vector& V, const Vector& S,
                      const Vector& F) {
    if (S.minCoeff() < 0 || F.minCoeff() < 0)
        throw NumericalError("solve_w: S and F must be nonnegative");
    if (S.maxCoeff() == 0.0 && F.maxCoeff() == 0.0)
        throw NumericalError("solve_w: S and F cannot both vanish");
    const Vector& m = form.grid.measure;
    Matrix P = form.form_matrix - Matrix(m.cwiseProduct(V + S).asDiagonal());
    Eigen::LDLT<Matrix> ldlt(P);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 0.0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(
            Matrix(m.cwiseSqrt().cwiseInverse().asDiagonal()) * P *
            Matrix(m.cwiseSqrt().cwiseInverse().asDiagonal()));
        throw NumericalError("solve_w: shifted pencil not positive definite (smallest eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    Vector w = ldlt.solve(m.cwiseProduct(F));
    if (w.minCoeff() <= 0.0) throw NumericalError("solve_w: solution is not strictly positive");
    return w;
}

inline DoobForm build_doob(const NonlocalForm& form, const Vector& V, const Vector& w,
                           const Vector& S, const Vector& F, int n_probes = 100,
                           std::uint64_t seed = 0x0d00b5eedULL) {
    const Index N = form.grid.size();
    if (w.minCoeff() <= 0.0) throw AssemblyError("build_doob: weight must be strictly positive");

    DoobForm d;
    d.alpha = form.alpha;
    d.norm_const = form.norm_const;
    d.measure = form.grid.measure;
    d.w = w;
    d.S = S;
    d.F = F;
    d.weighted_measure = d.measure.cwiseProduct(w.cwiseAbs2());
    d.zero_order = d.measure.cwiseProduct(F).cwiseProduct(w);

    const Matrix Kw = form.interaction.cwiseProduct(w * w.transpose());
    d.form_matrix.resize(N, N);
    for (Index i = 0; i < N; ++i) {
        double rowsum = 0.0;
        for (Index j = 0; j < N; ++j) {
            if (j == i) continue;
            rowsum += Kw(i, j);
            d.form_matrix(i, j) = -form.norm_const * Kw(i, j);
        }
        d.form_matrix(i, i) = form.norm_const * rowsum + d.zero_order[i];
    }

    // conjugation identity sweep
    Matrix PV = form.form_matrix - Matrix(d.measure.cwiseProduct(V).asDiagonal());
    const Vector sw2 = d.measure.cwiseProduct(S).cwiseProduct(w.cwiseAbs2());
    ProbeRng rng(seed);
    double worst = 0.0;
    for (int p = 0; p < n_probes; ++p) {
        const Vector f = rng.gaussian(N);
        const double lhs = d.energy(f) + sw2.dot(f.cwiseAbs2());
        const Vector wf = w.cwiseProduct(f);
        const double rhs = wf.dot(PV * wf);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
    }
    d.conjugation_residual = worst;
    if (worst > 1e-8)
        throw AssemblyError("build_doob: conjugation identity violated (relative error " +
                            std::to_string(worst) + "); w is not a discrete solution");
    return d;
}

/// Eigenpairs of Q^w in L2(w^2 m); by conjugation these coincide with the
/// spectrum of L_V - S.
inline SpectralResult doob_eigensolve(const DoobForm& d, Index m_count) {
    const Index N = d.measure.size();
    m_count = std::min(m_count, N);
    const Vector scale = d.weighted_measure.cwiseSqrt().cwiseInverse();
    Matrix M = scale.asDiagonal() * d.form_matrix * scale.asDiagonal();
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    if (es.info() != Eigen::Success) throw NumericalError("doob_eigensolve: eigensolver failed");
    SpectralResult out;
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = scale.asDiagonal() * es.eigenvectors().leftCols(m_count);
    detail::fix_ground_state_sign(out.eigenvectors);
    return out;
}

/// Sobolev exponents r = d/(d-alpha), q = (2r-1)/r, s = 2r/(r-1). For alpha >= d
/// (possible only outside the paper's range) r is infinite and the limiting
/// values q = 2, s = 2 and sup-norms are used.
struct SobolevExponents {
    double r = 0.0;
    double q = 0.0;
    double s = 0.0;
    bool r_infinite = false;
};

inline SobolevExponents sobolev_exponents(int d, double alpha) {
    SobolevExponents e;
    if (alpha < d) {
        e.r = d / (d - alpha);
        e.q = (2.0 * e.r - 1.0) / e.r;
        e.s = 2.0 * e.r / (e.r - 1.0);
    } else {
        e.r_infinite = true;
        e.r = std::numeric_limits<double>::infinity();
        e.q = 2.0;
        e.s = 2.0;
    }
    return e;
}

/// ||g||_{L^{2r}(m)}^2, with the sup-norm limit for infinite r.
inline double l2r_norm_sq(const Vector& g, const Vector& m, const SobolevExponents& e) {
    if (e.r_infinite) {
        const double mx = g.cwiseAbs().maxCoeff();
        return mx * mx;
    }
    return std::pow(g.array().abs().pow(2.0 * e.r).matrix().dot(m), 1.0 / e.r);
}

/// ||f^2||_{L^q(w^2 m)} = (sum m w^2 |f|^{2q})^{1/q}.
inline double lq_norm_fsq(const Vector& f, const Vector& wm, double q) {
    return std::pow(f.array().abs().pow(2.0 * q).matrix().dot(wm), 1.0 / q);
}

/// Empirical Sobolev constant: 1.5 x the largest observed value of
/// ||g||^2_{2r} / E_V[g] over stored eigenvectors, random probes and nodal bumps.
/// The safety factor records that probes only produce lower bounds.
inline double sobolev_constant(const NonlocalForm& form, const Vector& V,
                               const SpectralResult& v_spec, const SobolevExponents& e,
                               int n_random = 1000, std::uint64_t seed = 0x50b01e5ULL) {
    const Index N = form.grid.size();
    Matrix P = form.form_matrix - Matrix(form.grid.measure.cwiseProduct(V).asDiagonal());
    const Vector& m = form.grid.measure;
    double best = 0.0;
    auto consider = [&](const Vector& g) {
        const double en = g.dot(P * g);
        if (en <= 0.0) return;
        best = std::max(best, l2r_norm_sq(g, m, e) / en);
    };
    for (Index k = 0; k < v_spec.stored(); ++k) consider(v_spec.eigenvectors.col(k));
    ProbeRng rng(seed);
    for (int p = 0; p < n_random; ++p) consider(rng.gaussian(N));
    Vector bump = Vector::Zero(N);
    for (Index i = 0; i < N; ++i) {
        bump[i] = 1.0;
        consider(bump);
        bump[i] = 0.0;
    }
    return 1.5 * best;
}

/// Every named constant of the subcritical estimates for one (S, F, w) instance.
struct ConstantLedger {
    double C_G = 0.0;       // free Green lower-bound constant
    double C_H = 0.0;       // free Hardy constant
    double C0 = 0.0;        // C_G (sum m phi0 S w + sum m phi0 F)
    double Lambda1 = 0.0;   // 1 + C_H C0 / 2
    double Lambda2 = 0.0;   // ||F||_inf^2/2 + C_H C0 lambda0/2
    double C_S = 0.0;       // empirical Sobolev constant of E_V
    double r = 0.0, q = 0.0, s = 0.0;
    bool r_infinite = false;
    double A = 0.0;         // (C0 C_H + C_S)(1 + lambda0 C_S |Omega|^{1-1/r})
    double C1 = 0.0;        // ultracontractivity prefactor
    double lambda0_free = 0.0;
    double lambda0_V = 0.0;
    double volume = 0.0;
    double S_sup = 0.0;

    double C_of_t(double t) const { return C1 * std::pow(t, -0.5 * s) * std::exp(t * lambda0_V); }
};

inline ConstantLedger make_ledger(const NonlocalForm& form, const SpectralResult& free_spec,
                                  const GreenData& free_green, const SpectralResult& v_spec,
                                  const Vector& S, const Vector& F, const Vector& w, double C_S,
                                  const SobolevExponents& e) {
    ConstantLedger led;
    led.C_G = free_green.C_G;
    led.C_H = free_green.C_H;
    led.lambda0_free = free_spec.lambda0();
    led.lambda0_V = v_spec.lambda0();
    led.volume = form.grid.measure.sum();
    led.S_sup = S.cwiseAbs().maxCoeff();
    const Vector phi0 = free_spec.ground_state();
    const Vector& m = form.grid.measure;
    led.C0 = led.C_G * (m.cwiseProduct(phi0).dot(S.cwiseProduct(w)) + m.cwiseProduct(phi0).dot(F));
    led.Lambda1 = 1.0 + 0.5 * led.C_H * led.C0;
    const double f_sup = F.cwiseAbs().maxCoeff();
    led.Lambda2 = 0.5 * f_sup * f_sup + 0.5 * led.C_H * led.C0 * led.lambda0_free;
    led.C_S = C_S;
    led.r = e.r;
    led.q = e.q;
    led.s = e.s;
    led.r_infinite = e.r_infinite;
    const double volpow = e.r_infinite ? led.volume : std::pow(led.volume, 1.0 - 1.0 / e.r);
    led.A = (led.C0 * led.C_H + C_S) * (1.0 + led.lambda0_free * C_S * volpow);
    return led;
}

/// Smallest gap of the exact lower bound w >= C0 phi0 (nonnegative when it holds).
inline double w_lower_bound_margin(const Vector& w, const Vector& phi0_free, double C0) {
    return (w - C0 * phi0_free).minCoeff();
}

// --- probe-based inequality checks ----------------------------------------
// Each returns the maximal relative violation max over probes of
// (lhs - rhs)/max(|lhs|,|rhs|); values <= 0 mean the inequality held everywhere.

inline std::vector<Vector> inequality_probes(const DoobForm& d, const SpectralResult& doob_spec,
                                             int n_random, std::uint64_t seed,
                                             Index max_eigvecs = 64) {
    std::vector<Vector> probes;
    const Index ne = std::min(doob_spec.stored(), max_eigvecs);
    for (Index k = 0; k < ne; ++k) probes.push_back(doob_spec.eigenvectors.col(k));
    ProbeRng rng(seed);
    const Index N = d.measure.size();
    for (int p = 0; p < n_random; ++p) probes.push_back(rng.gaussian(N));
    probes.push_back(Vector::Ones(N));
    return probes;
}

/// Lemma-type L2 estimate: sum m f^2 <= C0 C_H ( interaction_w[f] + lambda0 sum m w^2 f^2 ).
inline double l2_estimate_check(const DoobForm& d, const ConstantLedger& led,
                                const std::vector<Vector>& probes) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vector& f : probes) {
        const double lhs = d.measure.dot(f.cwiseAbs2());
        const double rhs = led.C0 * led.C_H *
                           (d.interaction_energy(f) +
                            led.lambda0_free * d.weighted_measure.dot(f.cwiseAbs2()));
        worst = std::max(worst, relative_gap(lhs, rhs));
    }
    return worst;
}

/// (IS1): ||f^2||_{L^q(w^2 m)} <= A ( Q^w[f] + sum m S w^2 f^2 ).
inline double is1_check(const DoobForm& d, const ConstantLedger& led,
                        const std::vector<Vector>& probes) {
    const Vector sw2 = d.measure.cwiseProduct(d.S).cwiseProduct(d.w.cwiseAbs2());
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vector& f : probes) {
        const double lhs = lq_norm_fsq(f, d.weighted_measure, led.q);
        const double rhs = led.A * (d.energy(f) + sw2.dot(f.cwiseAbs2()));
        worst = std::max(worst, relative_gap(lhs, rhs));
    }
    return worst;
}

/// Lambda bound: Q^w[f] <= Lambda1 interaction_w[f] + Lambda2 sum m w^2 f^2.
inline double lambda_inequality_check(const DoobForm& d, const ConstantLedger& led,
                                      const std::vector<Vector>& probes) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vector& f : probes) {
        const double lhs = d.energy(f);
        const double rhs = led.Lambda1 * d.interaction_energy(f) +
                           led.Lambda2 * d.weighted_measure.dot(f.cwiseAbs2());
        worst = std::max(worst, relative_gap(lhs, rhs));
    }
    return worst;
}

/// Kernel sup norm of T_t^w against the w^2 m pairing, i.e. the L1(w^2 dx) -> Linf
/// operator norm, from the transformed eigenpairs.
inline double transformed_kernel_sup(const SpectralResult& doob_spec, double t) {
    const Matrix B = doob_spec.eigenvectors *
                     (-0.5 * t * doob_spec.eigenvalues.head(doob_spec.stored()))
                         .array()
                         .exp()
                         .matrix()
                         .asDiagonal();
    return (B * B.transpose()).cwiseAbs().maxCoeff();
}

/// C1 := max over the t list of ||T_t^w||_{1,inf} t^{s/2} e^{-||S||_inf t}.
inline double ultracontractivity_constant(const SpectralResult& doob_spec, double s_exp,
                                          double S_sup, const std::vector<double>& t_list) {
    if (t_list.empty()) throw NumericalError("ultracontractivity_constant: empty t list");
    double c1 = 0.0;
    for (const double t : t_list)
        c1 = std::max(c1, transformed_kernel_sup(doob_spec, t) * std::pow(t, 0.5 * s_exp) *
                              std::exp(-S_sup * t));
    return c1;
}

/// Minimize a smooth positive function over t in [tlo, thi] (log grid plus
/// golden-section refinement). Returns {min value, argmin}.
inline std::pair<double, double> minimize_over_t(const std::function<double(double)>& f,
                                                 double tlo, double thi, int n_grid = 200) {
    double best = std::numeric_limits<double>::max(), tbest = tlo;
    const double lr = std::log(thi / tlo);
    int ibest = 0;
    for (int i = 0; i < n_grid; ++i) {
        const double t = tlo * std::exp(lr * i / (n_grid - 1));
        const double v = f(t);
        if (v < best) {
            best = v;
            tbest = t;
            ibest = i;
        }
    }
    double a = tlo * std::exp(lr * std::max(0, ibest - 1) / (n_grid - 1));
    double b = tlo * std::exp(lr * std::min(n_grid - 1, ibest + 1) / (n_grid - 1));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), dd = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
        if (f(c) < f(dd)) b = dd; else a = c;
        c = b - gr * (b - a);
        dd = a + gr * (b - a);
    }
    const double tm = 0.5 * (a + b);
    const double vm = f(tm);
    return vm < best ? std::make_pair(vm, tm) : std::make_pair(best, tbest);
}

/// Two-sided ground-state/torsion comparison. The upper envelope is
/// inf_t C(V,t) from the torsion-transform ultracontractivity; the lower one is
/// inf_t M(V,t) = inf_t A C C^2(V,t) + 2 lambda_V from the Moser recursion,
/// with A and C = C0 C_H taken from the ground-state instance (S = lambda_V,
/// F = 0, w = phi_V).
struct ComparisonReport {
    double rho_plus = 0.0;   // max phi/xi
    double rho_minus = 0.0;  // min phi/xi
    double C_env = 0.0, C_env_t = 0.0;
    double M_env = 0.0, M_env_t = 0.0;
    bool upper_flag = false;  // rho_plus <= inf_t C(V,t)
    bool lower_flag = false;  // 1/rho_minus <= inf_t M(V,t)
};

inline ComparisonReport compare(const SpectralResult& v_spec, const Vector& xi,
                                const ConstantLedger& led_xi, double A_phi, double C_phi) {
    ComparisonReport rep;
    const Vector ratio = v_spec.ground_state().cwiseQuotient(xi);
    rep.rho_plus = ratio.maxCoeff();
    rep.rho_minus = ratio.minCoeff();
    const double lam = led_xi.lambda0_V;
    auto Cf = [&](double t) { return led_xi.C_of_t(t); };
    auto Mf = [&](double t) {
        const double c = Cf(t);
        return A_phi * C_phi * c * c + 2.0 * lam;
    };
    std::tie(rep.C_env, rep.C_env_t) = minimize_over_t(Cf, 1e-3 / lam, 1e3 / lam);
    std::tie(rep.M_env, rep.M_env_t) = minimize_over_t(Mf, 1e-3 / lam, 1e3 / lam);
    rep.upper_flag = rep.rho_plus <= rep.C_env;
    rep.lower_flag = 1.0 / rep.rho_minus <= rep.M_env;
    return rep;
}

/// Moser ladder Theta_k = ( sum_i m_i rho_i^{j_k} phi_i^2 )^{1/j_k}, j_k = 2 q^k,
/// in log space with compensated summation so large j_k cannot overflow.
inline Vector moser_ladder(const Vector& rho, const Vector& phi0, const Vector& m, double q,
                           int k_max) {
    if (!(q > 1.0)) throw NumericalError("moser_ladder: q must exceed 1");
    if (rho.minCoeff() <= 0.0) throw NumericalError("moser_ladder: ratio must be positive");
    const Index N = rho.size();
    Vector logrho = rho.array().log();
    Vector logbase = (m.array() * phi0.array().square()).log();
    Vector theta(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        const double jk = 2.0 * std::pow(q, k);
        double zmax = -std::numeric_limits<double>::max();
        for (Index i = 0; i < N; ++i) zmax = std::max(zmax, logbase[i] + jk * logrho[i]);
        double sum = 0.0, comp = 0.0;  // Kahan
        for (Index i = 0; i < N; ++i) {
            const double term = std::exp(logbase[i] + jk * logrho[i] - zmax);
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        theta[k] = std::exp((zmax + std::log(sum)) / jk);
    }
    return theta;
}

/// Per-step Moser recursion factors (M q^{2k})^{1/(2 q^k)}; reported, not asserted.
inline int moser_recursion_violations(const Vector& theta, double q, double M_env) {
    int bad = 0;
    for (int k = 0; k + 1 < theta.size(); ++k) {
        const double jk = 2.0 * std::pow(q, k);
        const double factor = std::pow(M_env * std::pow(q, 2.0 * k), 1.0 / jk);
        if (theta[k + 1] > factor * theta[k] * (1.0 + 1e-12)) ++bad;
    }
    return bad;
}

}  // namespace fslab

#endif

#ifndef FSLAB_SPECTRAL_HPP
#define FSLAB_SPECTRAL_HPP

#include "fslab/potential.hpp"

#include <cmath>
#include <utility>

namespace fslab {

/// Eigenpairs of the pencil (E - diag(mV), diag(m)), discrete-L2(m) orthonormal,
/// ground state sign-fixed positive. `eigenvalues` always carries the full
/// spectrum of the solve; `eigenvectors` keeps the first `stored` columns.
struct SpectralResult {
    Vector eigenvalues;
    Matrix eigenvectors;
    bool indefinite = false;   // lambda0 < 0 beyond tolerance (reported, not fatal)
    bool lambda0_simple = true;

    Index stored() const { return eigenvectors.cols(); }
    double lambda0() const { return eigenvalues[0]; }
    double gap() const { return eigenvalues[1] - eigenvalues[0]; }
    Vector ground_state() const { return eigenvectors.col(0); }
    bool full() const { return eigenvectors.cols() == eigenvectors.rows(); }
};

namespace detail {

inline void fix_ground_state_sign(Matrix& vecs) {
    Index imax = 0;
    vecs.col(0).cwiseAbs().maxCoeff(&imax);
    if (vecs(imax, 0) < 0.0) vecs.col(0) = -vecs.col(0);
}

}  // namespace detail

/// Solve for the m lowest eigenpairs of L_V = L0 - V. The dense symmetric solve
/// produces the whole spectrum; m only limits how many eigenvectors are stored
/// (m == N keeps everything, which makes heat-kernel synthesis exact).
/// Refuses potentials with relative bound >= 1 unless allow_critical is set.
inline SpectralResult eigensolve(const NonlocalForm& form, const Vector& V, Index m,
                                 bool allow_critical = false) {
    const Index N = form.grid.size();
    if (m < 2) throw NumericalError("eigensolve: need at least 2 eigenpairs");
    m = std::min(m, N);
    if (V.maxCoeff() > 0.0 && !allow_critical) {
        const double kappa = relative_bound(form, V);
        if (kappa >= 1.0)
            throw NumericalError("eigensolve: not subcritical (relative bound " +
                                 std::to_string(kappa) + " >= 1)");
    }
    const Vector scale = form.grid.measure.cwiseSqrt().cwiseInverse();
    Matrix M = form.form_matrix - Matrix(form.grid.measure.cwiseProduct(V).asDiagonal());
    M = scale.asDiagonal() * M * scale.asDiagonal();
    M = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolve: eigensolver failed");

    SpectralResult out;
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = scale.asDiagonal() * es.eigenvectors().leftCols(m);
    detail::fix_ground_state_sign(out.eigenvectors);
    const double scale0 = std::abs(out.eigenvalues[0]) + std::abs(out.eigenvalues[N - 1]);
    out.indefinite = out.eigenvalues[0] < -1e-12 * scale0;
    out.lambda0_simple = out.eigenvalues[1] - out.eigenvalues[0] > 1e-12 * scale0;
    return out;
}

/// Torsion function: the solution of L_V xi = 1, i.e. (E - diag(mV)) xi = m.
inline Vector torsion(const NonlocalForm& form, const Vector& V) {
    Matrix P = form.form_matrix - Matrix(form.grid.measure.cwiseProduct(V).asDiagonal());
    Eigen::LDLT<Matrix> ldlt(P);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw NumericalError("torsion: form pencil is not positive definite");
    return ldlt.solve(form.grid.measure);
}

/// Green data of L_V: the inverse of the form pencil, the torsion function, and
/// the two constants used downstream.
///   C_G = min_ij G_ij / (phi0_i phi0_j)   (ground-state kernel lower bound)
///   C_H = top eigenvalue of diag(m/phi0^2) f = C_H E f  (Hardy constant against
///         the free form; the V = 0 instance is the one the estimates consume)
struct GreenData {
    Matrix green;
    Vector torsion;
    double C_G = 0.0;
    double C_H = 0.0;
};

inline GreenData green_matrix(const NonlocalForm& form, const Vector& V,
                              const SpectralResult& spec) {
    if (spec.lambda0() <= 1e-8)
        throw NumericalError("green_matrix: pencil nearly singular (lambda0 <= 1e-8)");
    GreenData out;
    Matrix P = form.form_matrix - Matrix(form.grid.measure.cwiseProduct(V).asDiagonal());
    out.green = P.ldlt().solve(Matrix::Identity(form.grid.size(), form.grid.size()));
    out.green = 0.5 * (out.green + out.green.transpose());
    out.torsion = out.green * form.grid.measure;
    const Vector phi0 = spec.ground_state();
    out.C_G = (out.green.array() / (phi0 * phi0.transpose()).array()).minCoeff();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
        Matrix(form.grid.measure.cwiseQuotient(phi0.cwiseAbs2()).asDiagonal()),
        form.form_matrix);
    if (es.info() != Eigen::Success) throw NumericalError("green_matrix: Hardy eigensolve failed");
    out.C_H = es.eigenvalues().maxCoeff();
    return out;
}

inline GreenData green_matrix(const NonlocalForm& form, const Vector& V) {
    return green_matrix(form, V, eigensolve(form, V, 2, true));
}

/// Residual of the ground-state representation phi = K(V phi) + lambda K phi,
/// with K the free Green operator. Exact at the discrete level, so the residual
/// is a solver-accuracy diagnostic.
inline double ground_state_representation_residual(const NonlocalForm& form, const Vector& V,
                                                   const SpectralResult& spec,
                                                   const GreenData& free_green) {
    const Vector phi = spec.ground_state();
    const Vector& m = form.grid.measure;
    const Vector recon = free_green.green * (m.cwiseProduct(V).cwiseProduct(phi)) +
                         spec.lambda0() * (free_green.green * m.cwiseProduct(phi));
    return std::sqrt((phi - recon).cwiseAbs2().dot(m));
}

/// Heat kernel by spectral synthesis: p_t(i,j) = sum_k e^{-lambda_k t} phi_k,i phi_k,j.
/// With fewer than N stored eigenvectors the truncation estimate
/// e^{-lambda_last t} * count must stay below trunc_tol.
inline Matrix heat_kernel(const SpectralResult& spec, double t, double trunc_tol = 1e-8) {
    if (!(t > 0)) throw NumericalError("heat_kernel: t must be positive");
    const Index m = spec.stored();
    if (!spec.full()) {
        const double tail = std::exp(-spec.eigenvalues[m - 1] * t) * double(m);
        if (tail > trunc_tol)
            throw NumericalError("heat_kernel: truncation error estimate " + std::to_string(tail) +
                                 " above tolerance; request more eigenpairs");
    }
    const Matrix B =
        spec.eigenvectors * (-0.5 * t * spec.eigenvalues.head(m)).array().exp().matrix().asDiagonal();
    return B * B.transpose();
}

/// Extremes of e^{lambda0 t} p_t(i,j) / (phi0_i phi0_j) over all node pairs.
inline std::pair<double, double> iuc_ratio(const Matrix& p_t, const Vector& phi0, double lambda0,
                                           double t) {
    const Matrix R = std::exp(lambda0 * t) * p_t.array().cwiseQuotient(
                         (phi0 * phi0.transpose()).array()).matrix();
    return {R.minCoeff(), R.maxCoeff()};
}

/// Ground-state energy read off the large-time heat kernel through the torsion
/// normalization: -(1/t) log( p_t(i0,j0) / (xi_i0 xi_j0) ).
inline double lambda_from_heat(const Matrix& p_t, const Vector& xi, double t, Index i0, Index j0) {
    const double val = p_t(i0, j0);
    if (!(val > 0.0) || !std::isfinite(val))
        throw NumericalError("lambda_from_heat: heat kernel underflow at the centre pair; "
                             "use a smaller t");
    return -std::log(val / (xi[i0] * xi[j0])) / t;
}

/// The two nodes closest to the domain centre (distinct in 1D with even n).
inline std::pair<Index, Index> center_pair(const Grid& g) {
    const Index i0 = g.center_node();
    Index j0 = i0;
    double best = std::numeric_limits<double>::max();
    const double c1 = 0.5 * (g.lo[0] + g.hi[0]);
    const double c2 = 0.5 * (g.lo[1] + g.hi[1]);
    for (Index i = 0; i < g.size(); ++i) {
        if (i == i0) continue;
        const double dx = g.x1[i] - c1;
        const double dy = g.dim == 2 ? g.x2[i] - c2 : 0.0;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best - 1e-15 * (1 + best)) {
            best = d2;
            j0 = i;
        }
    }
    return {i0, j0};
}

}  // namespace fslab

#endif

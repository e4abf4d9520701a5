#ifndef FSLAB_POTENTIAL_HPP
#define FSLAB_POTENTIAL_HPP

#include "fslab/nonlocal_form.hpp"

#include <cmath>
#include <numbers>
#include <optional>

namespace fslab {

enum class PotentialKind { none, hardy_origin, hardy_boundary, bounded_constant, tabulated };

/// Singular or bounded nonnegative potential with its critical-constant metadata.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::none;
    double strength = 0.0;                  // c
    std::optional<double> truncation;       // pointwise cap, applied after evaluation
    Vector tabulated;                       // node values for kind == tabulated

    /// Fraction c/c* for reporting; empty when no critical constant exists.
    std::optional<double> critical_fraction(int d, double alpha) const;
};

/// Sharp constants of the two Hardy-type potentials. Absent for the bounded and
/// tabulated kinds, which have no critical strength.
inline std::optional<double> critical_constant(PotentialKind kind, int d, double alpha) {
    switch (kind) {
        case PotentialKind::hardy_origin: {
            const double gp = std::tgamma(0.25 * (d + alpha));
            const double gm = std::tgamma(0.25 * (d - alpha));
            return std::pow(2.0, alpha) * gp * gp / (gm * gm);
        }
        case PotentialKind::hardy_boundary: {
            const double gg = std::tgamma(0.5 * (alpha + 1.0));
            return gg * gg / std::numbers::pi;
        }
        default:
            return std::nullopt;
    }
}

inline std::optional<double> PotentialSpec::critical_fraction(int d, double alpha) const {
    const auto cs = critical_constant(kind, d, alpha);
    if (!cs) return std::nullopt;
    return strength / *cs;
}

namespace detail {

/// Cell average of c/|x|^alpha over the cell containing the origin, by radial
/// closed form in 1D and by the radial/angular split over the square in 2D.
inline double origin_cell_average(const Grid& g, double c, double alpha) {
    if (alpha >= 1.0 && g.dim == 1)
        throw ConfigError("potential: origin lies on a node and c/|x|^alpha is not cell-integrable "
                          "for alpha >= 1; use a grid with the origin between nodes");
    if (g.dim == 1)
        return c * std::pow(0.5 * g.h, -alpha) / (1.0 - alpha);
    // square cell: 8 int_0^{pi/4} int_0^{(h/2)/cos t} r^{1-alpha} dr dt
    if (alpha >= 2.0) throw ConfigError("potential: origin-cell average diverges");
    const double radial = std::pow(0.5 * g.h, 2.0 - alpha) / (2.0 - alpha);
    const double angular = quad::gauss16(
        [&](double t) { return std::pow(std::cos(t), alpha - 2.0); }, 0.0, std::numbers::pi / 4.0);
    return c * 8.0 * radial * angular / (g.h * g.h);
}

}  // namespace detail

inline Vector evaluate(const PotentialSpec& spec, const Grid& g, double alpha) {
    const Index N = g.size();
    Vector V(N);
    switch (spec.kind) {
        case PotentialKind::none:
            V.setZero();
            break;
        case PotentialKind::bounded_constant:
            if (spec.strength < 0) throw ConfigError("potential: negative strength");
            V.setConstant(spec.strength);
            break;
        case PotentialKind::hardy_origin: {
            const bool inside1 = g.lo[0] < 0.0 && g.hi[0] > 0.0;
            const bool inside2 = g.dim == 1 || (g.lo[1] < 0.0 && g.hi[1] > 0.0);
            if (!inside1 || !inside2)
                throw ConfigError("potential: hardy_origin requires the origin inside the domain");
            for (Index i = 0; i < N; ++i) {
                const double r = g.dim == 1 ? std::abs(g.x1[i]) : std::hypot(g.x1[i], g.x2[i]);
                V[i] = r < 0.1 * g.h ? detail::origin_cell_average(g, spec.strength, alpha)
                                     : spec.strength * std::pow(r, -alpha);
            }
            break;
        }
        case PotentialKind::hardy_boundary:
            for (Index i = 0; i < N; ++i)
                V[i] = spec.strength * std::pow(g.boundary_distance[i], -alpha);
            break;
        case PotentialKind::tabulated:
            if (spec.tabulated.size() != N)
                throw ConfigError("potential: tabulated values do not match the grid size");
            if ((spec.tabulated.array() < 0.0).any())
                throw ConfigError("potential: tabulated values must be nonnegative");
            V = spec.tabulated;
            break;
    }
    if (spec.truncation) {
        if (!(*spec.truncation > 0)) throw ConfigError("potential: truncation level must be positive");
        V = V.cwiseMin(*spec.truncation);
    }
    return V;
}

/// Pointwise cap V_k = min(V, k).
inline Vector truncate(const Vector& V, double k) {
    if (!(k > 0)) throw ConfigError("truncate: level must be positive");
    return V.cwiseMin(k);
}

/// Ladder rung (1 - 1/k) V.
inline Vector fractional_truncate(const Vector& V, int k) {
    if (k < 2) throw ConfigError("fractional_truncate: k must be >= 2");
    return (1.0 - 1.0 / double(k)) * V;
}

/// Best constant kappa in sum m_i V_i f_i^2 <= kappa E[f], the top eigenvalue of
/// the pencil diag(mV) f = kappa E f. Zero potential short-circuits to zero.
inline double relative_bound(const NonlocalForm& form, const Vector& V) {
    if (V.size() != form.grid.size())
        throw NumericalError("relative_bound: potential has wrong length");
    if ((V.array() < 0.0).any()) throw NumericalError("relative_bound: potential must be >= 0");
    if (V.maxCoeff() == 0.0) return 0.0;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
        Matrix((form.grid.measure.cwiseProduct(V)).asDiagonal()), form.form_matrix);
    if (es.info() != Eigen::Success)
        throw NumericalError("relative_bound: generalized eigensolver failed");
    return es.eigenvalues().maxCoeff();
}

}  // namespace fslab

#endif

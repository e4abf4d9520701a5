#ifndef FSLAB_NONLOCAL_FORM_HPP
#define FSLAB_NONLOCAL_FORM_HPP

#include "fslab/grid.hpp"
#include "fslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace fslab {

/// Normalization A(d, alpha) = alpha Gamma((d+alpha)/2) / (2^{1-alpha} pi^{d/2} Gamma(1-alpha/2)).
/// Accepts the full order range alpha in (0,2); callers that care about the
/// stricter alpha < d regime treat it as reporting metadata.
inline double normalization_constant(int d, double alpha) {
    if (d < 1 || d > 3) throw std::domain_error("normalization_constant: d must be 1, 2 or 3");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::domain_error("normalization_constant: alpha must lie in (0, 2)");
    return alpha * std::tgamma(0.5 * (d + alpha)) /
           (std::pow(2.0, 1.0 - alpha) * std::pow(std::numbers::pi, 0.5 * d) *
            std::tgamma(1.0 - 0.5 * alpha));
}

namespace detail {

// Pair weights are integrals of |x-y|^{-d-alpha} over cell_i x cell_j, reduced to
// the difference variable u = x - y against the triangular cell autocorrelation.
//
// Cells that touch make that integral infinite for alpha >= 1; there the weight
// carries the quadratic profile ((u.e)/|c_i-c_j|)^2 of a linear function, which is
// the consistent finite replacement (differences of smooth grid functions vanish
// linearly across the shared face).

inline bool touching_pair_needs_correction(int d, int p, int q, double alpha) {
    if (alpha < 1.0) return false;
    if (d == 1) return p == 1;
    return (p == 1 && q == 0);  // 2D edge neighbours; corner pairs stay integrable
}

/// 1D weight for offset m >= 1: int (h - |u - mh|) u^{-1-alpha} du.
inline double pair_weight_1d(int m, double h, double alpha) {
    const double a0 = (m - 1) * h, b0 = m * h, c0 = (m + 1) * h;
    if (m == 1) {
        if (alpha >= 1.0)
            return std::pow(h, 1.0 - alpha) * (std::pow(2.0, 3.0 - alpha) - 2.0) /
                   ((2.0 - alpha) * (3.0 - alpha));
        return quad::power_integral(0.0, b0, -alpha) +
               c0 * quad::power_integral(b0, c0, -1.0 - alpha) -
               quad::power_integral(b0, c0, -alpha);
    }
    const double left = quad::power_integral(a0, b0, -alpha) -
                        a0 * quad::power_integral(a0, b0, -1.0 - alpha);
    const double right = c0 * quad::power_integral(b0, c0, -1.0 - alpha) -
                         quad::power_integral(b0, c0, -alpha);
    return left + right;
}

/// Radial part of the polar representation of a touching 2D weight: along the ray
/// at angle theta the integrand is piecewise poly(r) * r^{-1-alpha}, integrated in
/// closed form piece by piece. q is the second offset component (0 or 1).
inline double touching_ray_integral_2d(int q, double h, double alpha, bool corrected,
                                       double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double as = std::abs(s);
    const double inf = std::numeric_limits<double>::infinity();

    const double r_c1 = c > 0 ? h / c : inf;
    const double r_c2 = c > 0 ? 2.0 * h / c : inf;
    const double r_s1 = as > 0 ? h / as : inf;
    const double r_s2 = as > 0 ? 2.0 * h / as : inf;
    const double R = std::min(r_c2, q == 0 ? r_s1 : r_s2);
    if (!(R > 0.0) || R == inf) return 0.0;

    double bps[5] = {0.0, std::min(r_c1, R), std::min(r_s1, R), std::min(r_s2, R), R};
    std::sort(bps, bps + 5);

    double total = 0.0;
    for (int seg = 0; seg < 4; ++seg) {
        const double r0 = bps[seg], r1 = bps[seg + 1];
        if (!(r1 > r0)) continue;
        const double rm = 0.5 * (r0 + r1);
        // factor along the first axis (offset component 1)
        const double a1 = rm <= r_c1 ? 0.0 : 2.0 * h;
        const double b1 = rm <= r_c1 ? c : -c;
        // factor along the second axis (offset component q)
        double a2, b2;
        if (q == 0) {
            a2 = h;
            b2 = -as;
        } else {
            a2 = rm <= r_s1 ? 0.0 : 2.0 * h;
            b2 = rm <= r_s1 ? as : -as;
        }
        double coeff[3] = {a1 * a2, a1 * b2 + a2 * b1, b1 * b2};
        int base = 0;
        if (corrected) base = 2;  // extra (r c / h)^2
        const double corr = corrected ? (c * c) / (h * h) : 1.0;
        for (int k = 0; k < 3; ++k) {
            if (coeff[k] == 0.0) continue;
            total += corr * coeff[k] * quad::power_integral(r0, r1, k + base - 1.0 - alpha);
        }
    }
    return total;
}

inline double pair_weight_2d(int p, int q, double h, double alpha) {
    if (p < q) std::swap(p, q);
    const double inv = -(2.0 + alpha) / 2.0;
    if (p >= 2) {
        // separated cells: smooth integrand, tensor Gauss on the kink-split rectangles
        auto f = [&](double u1, double u2) {
            const double t1 = h - std::abs(u1 - p * h);
            const double t2 = h - std::abs(u2 - q * h);
            return t1 * t2 * std::pow(u1 * u1 + u2 * u2, inv);
        };
        double tot = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double ax = (p - 1 + i) * h, bx = (p + i) * h;
                const double ay = (q - 1 + j) * h, by = (q + j) * h;
                tot += quad::gauss8_rect(f, ax, bx, ay, by);
            }
        return tot;
    }
    // touching cells (p == 1, q in {0,1}): polar integration, radial part closed form
    const bool corrected = touching_pair_needs_correction(2, p, q, alpha);
    auto F = [&](double th) { return touching_ray_integral_2d(q, h, alpha, corrected, th); };
    const double splits[5] = {0.0, std::atan(0.5), std::numbers::pi / 4.0, std::atan(2.0),
                              std::numbers::pi / 2.0};
    double tot = 0.0;
    for (int seg = 0; seg < 4; ++seg) tot += quad::gauss16(F, splits[seg], splits[seg + 1]);
    if (q == 0) tot *= 2.0;  // the theta < 0 half by symmetry
    return tot;
}

// --- killing term ---------------------------------------------------------
//
// kappa_i = A int_{cell_i} q(x) dx with q(x) = int_{complement} |x-y|^{-d-alpha} dy.
// In 1D q is elementary. In 2D the complement of the box decomposes into four
// half-planes minus the doubly counted corner quadrants; the half-plane parts
// reduce to one-dimensional power integrals, the quadrant parts to cos^alpha
// integrals via the exit-distance formula q_region = (1/alpha) int R(theta)^-alpha.

inline double killing_density_1d(double x, double a, double b, double alpha) {
    return (std::pow(b - x, -alpha) + std::pow(x - a, -alpha)) / alpha;
}

inline double quadrant_density_2d(double u, double v, double alpha) {
    const double half = quad::cospow_halfpi(alpha);
    const double tstar = std::atan2(v, u);
    const double iu = half - quad::cospow_integral(alpha, tstar);
    const double iv = half - quad::cospow_integral(alpha, std::numbers::pi / 2.0 - tstar);
    return (std::pow(u, -alpha) * iu + std::pow(v, -alpha) * iv) / alpha;
}

inline double killing_density_2d(double x1, double x2, const Grid& g, double alpha) {
    const double wr = g.hi[0] - x1, wl = x1 - g.lo[0];
    const double wt = g.hi[1] - x2, wb = x2 - g.lo[1];
    const double strip = 2.0 * quad::cospow_halfpi(alpha) / alpha;
    double q = strip * (std::pow(wr, -alpha) + std::pow(wl, -alpha) + std::pow(wt, -alpha) +
                        std::pow(wb, -alpha));
    q -= quadrant_density_2d(wr, wt, alpha) + quadrant_density_2d(wr, wb, alpha) +
         quadrant_density_2d(wl, wt, alpha) + quadrant_density_2d(wl, wb, alpha);
    return q;
}

/// Corner-quadrant part integrated over a rectangle. The density vanishes
/// linearly toward u = 0 (and v = 0) but carries fractional u^{1+alpha} terms,
/// so strips reaching a coordinate axis are split dyadically in that direction;
/// only the cell at the domain corner recurses toward the singular point, with
/// contributions decaying like 2^{-(2-alpha)} per level.
inline double quadrant_cell_integral(double u0, double u1, double v0, double v1, double alpha,
                                     int depth = 0) {
    auto f = [&](double u, double v) { return quadrant_density_2d(u, v, alpha); };
    const bool u_zero = u0 <= 0.0, v_zero = v0 <= 0.0;
    if (!u_zero && !v_zero) return quad::gauss8_rect(f, u0, u1, v0, v1);
    if (depth >= 40) return 0.0;  // negligible residual at the cap
    if (u_zero && v_zero) {
        const double um = 0.5 * u1, vm = 0.5 * v1;
        return quadrant_cell_integral(um, u1, 0.0, vm, alpha, depth + 1) +
               quadrant_cell_integral(0.0, um, vm, v1, alpha, depth + 1) +
               quadrant_cell_integral(um, u1, vm, v1, alpha, depth + 1) +
               quadrant_cell_integral(0.0, um, 0.0, vm, alpha, depth + 1);
    }
    if (u_zero) {
        const double um = 0.5 * u1;
        return quadrant_cell_integral(um, u1, v0, v1, alpha, depth + 1) +
               quadrant_cell_integral(0.0, um, v0, v1, alpha, depth + 1);
    }
    const double vm = 0.5 * v1;
    return quadrant_cell_integral(u0, u1, vm, v1, alpha, depth + 1) +
           quadrant_cell_integral(u0, u1, 0.0, vm, alpha, depth + 1);
}

inline double killing_cell_1d(const Grid& g, Index i, double alpha, double A) {
    const double a = g.lo[0], b = g.hi[0];
    const double lo = g.x1[i] - 0.5 * g.h, hi = g.x1[i] + 0.5 * g.h;
    const bool touches = (i == 0) || (i == g.n1 - 1);
    if (touches && alpha >= 1.0)
        return A * g.h * killing_density_1d(g.x1[i], a, b, alpha);
    return (A / alpha) * (quad::power_integral(b - hi, b - lo, -alpha) +
                          quad::power_integral(lo - a, hi - a, -alpha));
}

inline double killing_cell_2d(const Grid& g, Index i, double alpha, double A) {
    const double h = g.h;
    const double x1 = g.x1[i], x2 = g.x2[i];
    const bool touches = g.boundary_distance[i] <= 0.5 * h * (1.0 + 1e-12);
    if (touches && alpha >= 1.0) return A * h * h * killing_density_2d(x1, x2, g, alpha);

    const double strip = 2.0 * quad::cospow_halfpi(alpha) / alpha;
    // half-plane strips: closed form in the normal coordinate
    double acc = 0.0;
    const double dr[2] = {g.hi[0] - (x1 + 0.5 * h), g.hi[0] - (x1 - 0.5 * h)};
    const double dl[2] = {(x1 - 0.5 * h) - g.lo[0], (x1 + 0.5 * h) - g.lo[0]};
    const double dt[2] = {g.hi[1] - (x2 + 0.5 * h), g.hi[1] - (x2 - 0.5 * h)};
    const double db[2] = {(x2 - 0.5 * h) - g.lo[1], (x2 + 0.5 * h) - g.lo[1]};
    acc += quad::power_integral(std::max(dr[0], 0.0), dr[1], -alpha);
    acc += quad::power_integral(std::max(dl[0], 0.0), dl[1], -alpha);
    acc += quad::power_integral(std::max(dt[0], 0.0), dt[1], -alpha);
    acc += quad::power_integral(std::max(db[0], 0.0), db[1], -alpha);
    double kappa = strip * h * acc;

    // corner quadrants, subtracted once each
    const double us[2] = {dr[0], dl[0]};     // distances to the right/left side
    const double vs[2] = {dt[0], db[0]};     // distances to the top/bottom side
    for (int cu = 0; cu < 2; ++cu)
        for (int cv = 0; cv < 2; ++cv)
            kappa -= quadrant_cell_integral(us[cu], us[cu] + h, vs[cv], vs[cv] + h, alpha);
    return A * kappa;
}

}  // namespace detail

/// Discrete Dirichlet form of the killed fractional Laplacian:
///   E[f] = (A/2) sum_{i != j} (f_i - f_j)^2 K_ij + sum_i f_i^2 kappa_i.
/// `interaction` holds the raw pair quadrature K_ij (no A factor);
/// `killing` holds kappa_i including both A and the cell integration;
/// `form_matrix` is the symmetric matrix E with f' E f = E[f].
struct NonlocalForm {
    Grid grid;
    double alpha = 0.0;
    double norm_const = 0.0;
    Matrix interaction;
    Vector killing;
    Matrix form_matrix;

    double energy(const Vector& f) const { return f.dot(form_matrix * f); }

    /// (L0 f)_i = [A sum_j (f_i - f_j) K_ij + f_i kappa_i] / m_i = (E f)_i / m_i.
    Vector apply_generator(const Vector& f) const {
        if (f.size() != grid.size())
            throw NumericalError("apply_generator: grid function has wrong length");
        return (form_matrix * f).cwiseQuotient(grid.measure);
    }
};

inline NonlocalForm assemble(const Grid& g, double alpha) {
    NonlocalForm form;
    form.grid = g;
    form.alpha = alpha;
    form.norm_const = normalization_constant(g.dim, alpha);
    const Index N = g.size();
    const double A = form.norm_const;

    form.interaction = Matrix::Zero(N, N);
    if (g.dim == 1) {
        std::vector<double> w(g.n1);
        for (Index m = 1; m < g.n1; ++m) w[m] = detail::pair_weight_1d(int(m), g.h, alpha);
        for (Index i = 0; i < N; ++i)
            for (Index j = i + 1; j < N; ++j) {
                form.interaction(i, j) = w[j - i];
                form.interaction(j, i) = w[j - i];
            }
    } else {
        std::map<std::pair<int, int>, double> cache;
        auto weight = [&](int p, int q) {
            if (p < q) std::swap(p, q);
            auto it = cache.find({p, q});
            if (it != cache.end()) return it->second;
            const double v = detail::pair_weight_2d(p, q, g.h, alpha);
            cache.insert({{p, q}, v});
            return v;
        };
        for (Index i = 0; i < N; ++i) {
            for (Index j = i + 1; j < N; ++j) {
                const int p = int(std::lround(std::abs(g.x1[i] - g.x1[j]) / g.h));
                const int q = int(std::lround(std::abs(g.x2[i] - g.x2[j]) / g.h));
                const double v = weight(p, q);
                form.interaction(i, j) = v;
                form.interaction(j, i) = v;
            }
        }
    }

    form.killing.resize(N);
    for (Index i = 0; i < N; ++i)
        form.killing[i] = g.dim == 1 ? detail::killing_cell_1d(g, i, alpha, A)
                                     : detail::killing_cell_2d(g, i, alpha, A);

    form.form_matrix.resize(N, N);
    for (Index i = 0; i < N; ++i) {
        double rowsum = 0.0;
        for (Index j = 0; j < N; ++j) {
            if (j == i) continue;
            rowsum += form.interaction(i, j);
            form.form_matrix(i, j) = -A * form.interaction(i, j);
        }
        form.form_matrix(i, i) = A * rowsum + form.killing[i];
    }
    return form;
}

}  // namespace fslab

#endif

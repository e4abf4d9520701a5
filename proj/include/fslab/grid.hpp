#ifndef FSLAB_GRID_HPP
#define FSLAB_GRID_HPP

#include "fslab/common.hpp"

#include <array>
#include <cmath>

namespace fslab {

/// Cell-centered uniform grid on an interval or an axis-aligned box.
/// Nodes are cell centers; no node lies on the boundary, so boundary-distance
/// weighted quantities stay finite. Immutable after construction.
struct Grid {
    int dim = 1;
    double h = 0.0;                    // uniform spacing, equal on both axes in 2D
    Index n1 = 0, n2 = 1;              // cells per axis (n2 == 1 in 1D)
    std::array<double, 2> lo{0, 0};
    std::array<double, 2> hi{0, 0};
    Vector x1, x2;                     // node coordinates (x2 empty in 1D)
    Vector measure;                    // cell measure m_i (h or h^2)
    Vector boundary_distance;          // delta_i = dist(x_i, complement of the domain)
    double volume = 0.0;

    Index size() const { return x1.size(); }

    /// Index of the node closest to the domain center (ties: lowest index).
    Index center_node() const {
        const double c1 = 0.5 * (lo[0] + hi[0]);
        const double c2 = 0.5 * (lo[1] + hi[1]);
        Index best = 0;
        double bestd = std::numeric_limits<double>::max();
        for (Index i = 0; i < size(); ++i) {
            const double dx = x1[i] - c1;
            const double dy = dim == 2 ? x2[i] - c2 : 0.0;
            const double d2 = dx * dx + dy * dy;
            if (d2 < bestd - 1e-15 * (1 + bestd)) {
                bestd = d2;
                best = i;
            }
        }
        return best;
    }
};

inline Grid build_interval(double a, double b, int n) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("grid: interval endpoints must be finite");
    if (!(a < b)) throw ConfigError("grid: interval requires a < b");
    if (n < 4) throw ConfigError("grid: need at least 4 cells");

    Grid g;
    g.dim = 1;
    g.n1 = n;
    g.n2 = 1;
    g.lo = {a, 0.0};
    g.hi = {b, 0.0};
    g.h = (b - a) / n;
    g.volume = b - a;
    g.x1.resize(n);
    g.measure = Vector::Constant(n, g.h);
    g.boundary_distance.resize(n);
    for (int i = 0; i < n; ++i) {
        g.x1[i] = a + (i + 0.5) * g.h;
        g.boundary_distance[i] = std::min(g.x1[i] - a, b - g.x1[i]);
    }
    return g;
}

inline Grid build_box(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> n) {
    for (int k = 0; k < 2; ++k) {
        if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]))
            throw ConfigError("grid: box corners must be finite");
        if (!(lo[k] < hi[k])) throw ConfigError("grid: degenerate box");
        if (n[k] < 2) throw ConfigError("grid: need at least 2 cells per axis");
    }
    const double h1 = (hi[0] - lo[0]) / n[0];
    const double h2 = (hi[1] - lo[1]) / n[1];
    if (std::abs(h1 - h2) > 1e-12 * std::max(h1, h2))
        throw ConfigError("grid: box requires equal spacing on both axes");

    Grid g;
    g.dim = 2;
    g.n1 = n[0];
    g.n2 = n[1];
    g.lo = lo;
    g.hi = hi;
    g.h = h1;
    g.volume = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    const Index N = Index(n[0]) * Index(n[1]);
    g.x1.resize(N);
    g.x2.resize(N);
    g.measure = Vector::Constant(N, h1 * h1);
    g.boundary_distance.resize(N);
    Index id = 0;
    for (int i = 0; i < n[0]; ++i) {
        for (int j = 0; j < n[1]; ++j, ++id) {
            g.x1[id] = lo[0] + (i + 0.5) * h1;
            g.x2[id] = lo[1] + (j + 0.5) * h1;
            g.boundary_distance[id] = std::min(std::min(g.x1[id] - lo[0], hi[0] - g.x1[id]),
                                               std::min(g.x2[id] - lo[1], hi[1] - g.x2[id]));
        }
    }
    return g;
}

}  // namespace fslab

#endif

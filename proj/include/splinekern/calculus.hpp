#ifndef SPLINEKERN_CALCULUS_HPP
#define SPLINEKERN_CALCULUS_HPP

#include <cmath>
#include <stdexcept>

#include "splinekern/grid.hpp"

namespace splinekern {

namespace detail {

/// Second-order first derivative: centered in the interior, one-sided
/// three-point stencils at the two boundary nodes.
inline void diff_once(const Grid& g, const std::vector<double>& in,
                      std::vector<double>& out) {
    const std::size_t n = g.size();
    const double inv2d = 0.5 / g.spacing();
    out.resize(n);
    out[0] = (-3.0 * in[0] + 4.0 * in[1] - in[2]) * inv2d;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (in[i + 1] - in[i - 1]) * inv2d;
    out[n - 1] = (3.0 * in[n - 1] - 4.0 * in[n - 2] + in[n - 3]) * inv2d;
}

}  // namespace detail

/// ℓ-fold application of the second-order difference operator.
inline GridFunction derivative(const GridFunction& f, int order) {
    if (order < 0 || order > 4)
        throw std::invalid_argument("derivative: order must be in [0,4]");
    if (order > 0 && f.grid()->intervals() < 4 * static_cast<std::size_t>(order))
        throw std::invalid_argument("derivative: grid too coarse for requested order");
    if (order == 0) return f;
    std::vector<double> cur = f.values(), next;
    for (int l = 0; l < order; ++l) {
        detail::diff_once(*f.grid(), cur, next);
        cur.swap(next);
    }
    return GridFunction(f.grid(), std::move(cur));
}

/// L2(0,1) norm by trapezoid quadrature.
inline double l2_norm(const GridFunction& f) {
    const Grid& g = *f.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * f[i] * f[i];
    return std::sqrt(std::max(0.0, s));
}

inline double l1_norm(const GridFunction& f) {
    const Grid& g = *f.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * std::abs(f[i]);
    return s;
}

/// ‖f‖_mh = { ‖f‖² + h^{2m} ‖f^{(m)}‖² }^{1/2}
inline double norm_mh(const GridFunction& f, int m, double h) {
    if (m < 1) throw std::invalid_argument("norm_mh: m must be >= 1");
    if (!(h > 0.0 && h <= 1.0))
        throw std::invalid_argument("norm_mh: h must lie in (0,1]");
    const double a = l2_norm(f);
    const double b = l2_norm(derivative(f, m));
    return std::sqrt(a * a + std::pow(h, 2 * m) * b * b);
}

/// Weighted analogue ‖f‖_wmh = { ∫f²w + h^{2m} ‖f^{(m)}‖² }^{1/2}.
/// `w` is the design density tabulated on the same grid.
inline double norm_wmh(const GridFunction& f, const GridFunction& w, int m, double h) {
    if (m < 1) throw std::invalid_argument("norm_wmh: m must be >= 1");
    if (!(h > 0.0 && h <= 1.0))
        throw std::invalid_argument("norm_wmh: h must lie in (0,1]");
    const Grid& g = *f.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * f[i] * f[i] * w[i];
    const double b = l2_norm(derivative(f, m));
    return std::sqrt(std::max(0.0, s) + std::pow(h, 2 * m) * b * b);
}

/// Weighted L1 norm ∫|f| w.
inline double l1_norm_weighted(const GridFunction& f, const GridFunction& w) {
    const Grid& g = *f.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * std::abs(f[i]) * w[i];
    return s;
}

/// Total variation on the grid: Σ |f(t_{i+1}) − f(t_i)|.
inline double bv_seminorm(const GridFunction& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) s += std::abs(f[i + 1] - f[i]);
    return s;
}

}  // namespace splinekern

#endif

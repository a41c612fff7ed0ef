#ifndef SPLINEKERN_ESTIMATORS_HPP
#define SPLINEKERN_ESTIMATORS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "splinekern/calculus.hpp"
#include "splinekern/density.hpp"
#include "splinekern/grid.hpp"
#include "splinekern/kernel.hpp"

namespace splinekern {

/// Random sum (1/n) Σ D_i R^{(ℓ)}_wmh(X_i, ·); the kernel's derivative
/// order selects ℓ. For ℓ = 0 this is the C-spline sum.
inline GridFunction rk_sum(const std::vector<double>& x, const std::vector<double>& d,
                           const KernelOperator& k) {
    if (x.size() != d.size())
        throw std::invalid_argument("rk_sum: |X| and |D| must match");
    std::vector<double> gamma(k.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        k.accumulate_row_coefficients(gamma, x[i], inv_n * d[i]);
    return k.apply_coefficients(gamma);
}

/// Exponential-kernel sum s^{nh}(z) = (1/n) Σ D_i g_h(X_i − z) on the grid.
inline GridFunction exp_sum(const std::vector<double>& x, const std::vector<double>& d,
                            double h, GridPtr grid) {
    if (x.size() != d.size())
        throw std::invalid_argument("exp_sum: |X| and |D| must match");
    if (!(h > 0.0)) throw std::invalid_argument("exp_sum: h must be positive");
    const double inv_n = 1.0 / static_cast<double>(x.size());
    std::vector<double> out(grid->size(), 0.0);
    // g_h(x - z) for z <= x only: sort contributions with a sweep.
    // Direct O(n·N) evaluation is fine at the sizes used here.
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double z = grid->node(j);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double diff = x[i] - z;
            if (diff >= 0.0) s += d[i] * std::exp(-diff / h);
        }
        out[j] = s * inv_n / h;
    }
    return GridFunction(std::move(grid), std::move(out));
}

/// Convolution-kernel density estimator w^{nh}(t) = (1/n) Σ g_h(X_i − t).
inline GridFunction density_estimate(const std::vector<double>& x, double h,
                                     GridPtr grid) {
    return exp_sum(x, std::vector<double>(x.size(), 1.0), h, std::move(grid));
}

/// E[w^{nh}](t) = ∫ g_h(τ − t) w(τ) dτ by the exponentially-weighted product
/// trapezoid (same quadrature as exp_representation).
inline GridFunction expected_density(const DesignDensity& w, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("expected_density: h must be positive");
    const Grid& g = *w.grid();
    const double alpha = g.spacing() / h;
    const double decay = std::exp(-alpha);
    const double w1 = 1.0 - (1.0 - decay) / alpha;
    const double w0 = (1.0 - decay) - w1;
    // E[w^{nh}](t) = ∫_t^1 h^{-1} e^{-(τ-t)/h} w(τ) dτ: backward recursion.
    std::vector<double> out(g.size());
    out[g.size() - 1] = 0.0;
    for (std::size_t j = g.size() - 1; j-- > 0;)
        out[j] = decay * out[j + 1] + w0 * w[j + 1] + w1 * w[j];
    return GridFunction(w.grid(), std::move(out));
}

struct DiscrepancyResult {
    double discrepancy = 0.0;  // ∫ f d(W_n − W)
    double normalizer = 0.0;   // ‖f‖_{L¹(w)} + h‖f'‖_{L¹}
};

/// ∫ f d(W_n − W) = (1/n) Σ f(X_i) − ∫ f w, with the Lemma 3 normalizer.
inline DiscrepancyResult design_discrepancy(const GridFunction& f,
                                            const std::vector<double>& x,
                                            const DesignDensity& w, double h = 0.0) {
    DiscrepancyResult r;
    double emp = 0.0;
    for (const double xi : x) emp += eval_at(f, xi);
    emp /= static_cast<double>(x.size());
    const Grid& g = *f.grid();
    double expc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) expc += g.weight(i) * f[i] * w[i];
    r.discrepancy = emp - expc;
    if (h > 0.0)
        r.normalizer = l1_norm_weighted(f, w.values()) + h * l1_norm(derivative(f, 1));
    return r;
}

/// Lemma 4 ratio |∫ fg d(W_n − W)| / (‖f‖_wmh ‖g‖_wmh); 0 when a norm vanishes.
inline double pair_discrepancy(const GridFunction& f, const GridFunction& g,
                               const std::vector<double>& x, const DesignDensity& w,
                               int m, double h) {
    GridFunction fg = f;
    for (std::size_t i = 0; i < fg.size(); ++i) fg[i] *= g[i];
    const double num = std::abs(design_discrepancy(fg, x, w).discrepancy);
    const double nf = norm_wmh(f, w.values(), m, h);
    const double ng = norm_wmh(g, w.values(), m, h);
    if (nf == 0.0 || ng == 0.0) return 0.0;
    return num / (nf * ng);
}

/// Theorem 4 defect: { (1/n)Σ|f(X_j)|² + h^{2m}‖f^{(m)}‖² } / ‖f‖²_wmh.
inline double design_defect(const GridFunction& f, const std::vector<double>& x,
                            const DesignDensity& w, int m, double h) {
    const double norm = norm_wmh(f, w.values(), m, h);
    if (norm == 0.0)
        throw std::invalid_argument("design_defect: f has zero wmh norm");
    double emp = 0.0;
    for (const double xi : x) {
        const double v = eval_at(f, xi, interp_degree(m));
        emp += v * v;
    }
    emp /= static_cast<double>(x.size());
    const GridFunction fm = derivative(f, m);
    const double pen = std::pow(h, 2 * m) * l2_norm(fm) * l2_norm(fm);
    return (emp + pen) / (norm * norm);
}

struct DiagnosticsRecord {
    double h = 0.0;
    std::size_t n = 0;
    double zeta_ratio = 0.0;
    double eta_ratio = 0.0;
    double defect = 0.0;
    double rk_sum_sup = 0.0;
    double exp_sum_sup = 0.0;
    double density_dev_sup = 0.0;  // ‖w^{nh} − E[w^{nh}]‖_∞
};

}  // namespace splinekern

#endif

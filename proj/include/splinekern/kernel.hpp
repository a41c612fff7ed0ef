#ifndef SPLINEKERN_KERNEL_HPP
#define SPLINEKERN_KERNEL_HPP

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "splinekern/bvp.hpp"
#include "splinekern/calculus.hpp"
#include "splinekern/density.hpp"
#include "splinekern/grid.hpp"

namespace splinekern {

/// Discretized reproducing kernel R_wmh(t_i, s_j) (or its ℓ-th derivative in
/// the second argument). Row i is the function R(t_i, ·) on the grid.
class KernelOperator {
public:
    KernelOperator(GridPtr grid, std::shared_ptr<const DesignDensity> w, int m, double h,
                   int deriv_order, std::vector<double> matrix)
        : grid_(std::move(grid)), w_(std::move(w)), m_(m), h_(h),
          deriv_order_(deriv_order), k_(std::move(matrix)) {
        if (k_.size() != grid_->size() * grid_->size())
            throw std::invalid_argument("KernelOperator: matrix size mismatch");
    }

    const GridPtr& grid() const { return grid_; }
    const DesignDensity& density() const { return *w_; }
    std::shared_ptr<const DesignDensity> density_ptr() const { return w_; }
    int order() const { return m_; }
    double bandwidth() const { return h_; }
    int deriv_order() const { return deriv_order_; }
    std::size_t size() const { return grid_->size(); }

    double at(std::size_t i, std::size_t j) const { return k_[i * size() + j]; }
    const double* row(std::size_t i) const { return k_.data() + i * size(); }
    const std::vector<double>& matrix() const { return k_; }

    GridFunction row_function(std::size_t i) const {
        return GridFunction(grid_, std::vector<double>(row(i), row(i) + size()));
    }

    /// R(x, t_j) for off-grid x: local polynomial interpolation across rows.
    std::vector<double> row_at(double x) const {
        const InterpStencil st = interp_stencil(*grid_, x, interp_degree(m_));
        std::vector<double> out(size(), 0.0);
        for (std::size_t a = 0; a < st.weights.size(); ++a) {
            const double* r = row(st.first + a);
            const double c = st.weights[a];
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += c * r[j];
        }
        return out;
    }

    /// Accumulate coef * (interpolated row at x) into a row-coefficient
    /// vector; combined with apply_coefficients this evaluates sums
    /// Σ_i c_i R(x_i, ·) in O(Σ stencil) + one matrix pass.
    void accumulate_row_coefficients(std::vector<double>& gamma, double x,
                                     double coef) const {
        const InterpStencil st = interp_stencil(*grid_, x, interp_degree(m_));
        for (std::size_t a = 0; a < st.weights.size(); ++a)
            gamma[st.first + a] += coef * st.weights[a];
    }

    GridFunction apply_coefficients(const std::vector<double>& gamma) const {
        std::vector<double> out(size(), 0.0);
        for (std::size_t i = 0; i < size(); ++i) {
            const double c = gamma[i];
            if (c == 0.0) continue;
            const double* r = row(i);
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += c * r[j];
        }
        return GridFunction(grid_, std::move(out));
    }

    double max_abs() const {
        double s = 0.0;
        for (double v : k_) s = std::max(s, std::abs(v));
        return s;
    }

    double max_asymmetry() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                s = std::max(s, std::abs(at(i, j) - at(j, i)));
        return s;
    }

private:
    GridPtr grid_;
    std::shared_ptr<const DesignDensity> w_;
    int m_;
    double h_;
    int deriv_order_;
    std::vector<double> k_;  // row-major (size x size)
};

/// Build the reproducing kernel: column j is the BVP response to a discrete
/// delta of unit quadrature mass at node j. One factorization, N+1 solves.
inline KernelOperator greens_operator(std::shared_ptr<const DesignDensity> w, int m,
                                      double h) {
    const BvpOperator op(*w, m, h);
    const std::size_t n = op.grid()->size();
    std::vector<double> k(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<double> col = op.delta_response(j);
        for (std::size_t i = 0; i < n; ++i) k[i * n + j] = col[i];
    }
    return KernelOperator(op.grid(), std::move(w), m, h, 0, std::move(k));
}

inline KernelOperator greens_operator(const DesignDensity& w, int m, double h) {
    return greens_operator(std::make_shared<const DesignDensity>(w), m, h);
}

/// ⟨f, R(t_i, ·)⟩_wmh by quadrature; reproduces f(t_i) up to grid error.
inline double reproduce(const GridFunction& f, const KernelOperator& k, std::size_t t) {
    if (k.deriv_order() != 0)
        throw std::invalid_argument("reproduce: kernel must have derivative order 0");
    const Grid& g = *k.grid();
    const GridFunction& w = k.density().values();
    const GridFunction row = k.row_function(t);
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        s += g.weight(j) * f[j] * row[j] * w[j];
    const GridFunction fm = derivative(f, k.order());
    const GridFunction rm = derivative(row, k.order());
    double p = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) p += g.weight(j) * fm[j] * rm[j];
    return s + std::pow(k.bandwidth(), 2 * k.order()) * p;
}

/// Differentiates every row in the second argument.
inline KernelOperator kernel_derivative(const KernelOperator& k, int ell) {
    if (ell < 0 || ell > k.order())
        throw std::invalid_argument("kernel_derivative: need 0 <= ell <= m");
    if (ell == k.deriv_order()) return k;
    if (k.deriv_order() != 0)
        throw std::invalid_argument("kernel_derivative: base kernel must have ell = 0");
    const std::size_t n = k.size();
    std::vector<double> out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        GridFunction row = k.row_function(i);
        row = derivative(row, ell);
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = row[j];
    }
    return KernelOperator(k.grid(), k.density_ptr(), k.order(), k.bandwidth(), ell,
                          std::move(out));
}

/// One-sided exponential kernel g_h(x) = h⁻¹ e^{−x/h} 1(x ≥ 0).
inline double exp_kernel(double x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("exp_kernel: h must be positive");
    return x >= 0.0 ? std::exp(-x / h) / h : 0.0;
}

/// Per-bandwidth convolution-likeness measurements for A = h^ℓ K.
/// The family varies in the first argument with the second fixed, so the
/// L¹/BV measurements run down the columns.
struct ConvolutionLikeDiagnostics {
    double h = 0.0;
    int deriv_order = 0;
    double sup_l1 = 0.0;      // sup_t ‖A(·,t)‖_{L¹}
    double h_sup = 0.0;       // h · sup |A|
    double h_sup_bv = 0.0;    // h · sup_t |A(·,t)|_{BV}
};

inline ConvolutionLikeDiagnostics convolution_like_diagnostics(const KernelOperator& k) {
    const Grid& g = *k.grid();
    const std::size_t n = k.size();
    const double scale = std::pow(k.bandwidth(), k.deriv_order());
    ConvolutionLikeDiagnostics d;
    d.h = k.bandwidth();
    d.deriv_order = k.deriv_order();
    for (std::size_t j = 0; j < n; ++j) {
        double l1 = 0.0, bv = 0.0;
        double prev = scale * k.at(0, j);
        l1 += g.weight(0) * std::abs(prev);
        d.h_sup = std::max(d.h_sup, std::abs(prev));
        for (std::size_t i = 1; i < n; ++i) {
            const double v = scale * k.at(i, j);
            l1 += g.weight(i) * std::abs(v);
            bv += std::abs(v - prev);
            d.h_sup = std::max(d.h_sup, std::abs(v));
            prev = v;
        }
        d.sup_l1 = std::max(d.sup_l1, l1);
        d.h_sup_bv = std::max(d.h_sup_bv, bv);
    }
    d.h_sup *= d.h;
    d.h_sup_bv *= d.h;
    return d;
}

/// Integral representation u(x) = h g_h(x) u(0) + ∫ g_h(x−z){h u' + u} dz,
/// evaluated on the grid with an exponentially-weighted product trapezoid
/// (exact when the bracket is piecewise linear, hence exact on constants).
inline GridFunction exp_representation(const GridFunction& u, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("exp_representation: h must be positive");
    const Grid& g = *u.grid();
    const GridFunction du = derivative(u, 1);
    std::vector<double> phi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) phi[i] = h * du[i] + u[i];

    const double alpha = g.spacing() / h;
    const double decay = std::exp(-alpha);
    const double w1 = 1.0 - (1.0 - decay) / alpha;  // weight of right endpoint
    const double w0 = (1.0 - decay) - w1;           // weight of left endpoint

    std::vector<double> out(g.size());
    double integral = 0.0;
    out[0] = u[0];  // h g_h(0) u(0) = u(0)
    for (std::size_t i = 1; i < g.size(); ++i) {
        integral = decay * integral + w0 * phi[i - 1] + w1 * phi[i];
        out[i] = std::exp(-g.node(i) / h) * u[0] + integral;
    }
    return GridFunction(u.grid(), std::move(out));
}

/// Lemma 2 ratio: ‖(1/n)Σ D_i h^ℓ A(X_i,·)‖_∞ / ‖(1/n)Σ D_i g_h(X_i−·)‖_∞.
inline double lemma2_ratio(const KernelOperator& k, const std::vector<double>& d,
                           const std::vector<double>& x, double h) {
    if (d.size() != x.size() || x.empty())
        throw std::invalid_argument("lemma2_ratio: |D| and |X| must match and be >= 1");
    const std::size_t n = x.size();
    const Grid& g = *k.grid();
    std::vector<double> gamma(k.size(), 0.0);
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) all_zero = false;
        k.accumulate_row_coefficients(gamma, x[i], d[i] / static_cast<double>(n));
    }
    if (all_zero) return 0.0;
    const GridFunction num_fn = k.apply_coefficients(gamma);
    const double num = std::pow(k.bandwidth(), k.deriv_order()) * sup_norm(num_fn);
    double den = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += d[i] * exp_kernel(x[i] - g.node(j), h);
        den = std::max(den, std::abs(s) / static_cast<double>(n));
    }
    if (den == 0.0) throw std::runtime_error("lemma2_ratio: zero denominator");
    return num / den;
}

}  // namespace splinekern

#endif

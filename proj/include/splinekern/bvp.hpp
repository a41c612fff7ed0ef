#ifndef SPLINEKERN_BVP_HPP
#define SPLINEKERN_BVP_HPP

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "splinekern/banded.hpp"
#include "splinekern/calculus.hpp"
#include "splinekern/density.hpp"
#include "splinekern/grid.hpp"

namespace splinekern {

namespace detail {

inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Coefficients of the m-fold forward difference Δ^m / δ^m.
inline std::vector<double> forward_diff_coeffs(int m, double delta) {
    std::vector<double> c(static_cast<std::size_t>(m) + 1);
    const double scale = std::pow(delta, -m);
    for (int j = 0; j <= m; ++j)
        c[static_cast<std::size_t>(j)] = binom(m, j) * ((m - j) % 2 ? -1.0 : 1.0) * scale;
    return c;
}

}  // namespace detail

/// Discrete roughness penalty h^{2m} ∫(f^{(m)})², evaluated with the same
/// staggered m-fold difference quadratic form the solvers assemble. Using
/// the identical form keeps objective diagnostics exact.
inline double penalty_value(const GridFunction& f, int m, double h) {
    const Grid& g = *f.grid();
    const auto c = detail::forward_diff_coeffs(m, g.spacing());
    const std::size_t rows = g.size() - static_cast<std::size_t>(m);
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) {
        double d = 0.0;
        for (int j = 0; j <= m; ++j) d += c[static_cast<std::size_t>(j)] * f[k + j];
        s += d * d;
    }
    return std::pow(h, 2 * m) * g.spacing() * s;
}

/// Adds h^{2m} Dᵀ Q_m D to the band matrix (D = staggered m-fold forward
/// difference, midpoint quadrature weight δ per row).
inline void add_penalty_band(SymmetricBandMatrix& a, const Grid& g, int m, double h) {
    const auto c = detail::forward_diff_coeffs(m, g.spacing());
    const double scale = std::pow(h, 2 * m) * g.spacing();
    const std::size_t rows = g.size() - static_cast<std::size_t>(m);
    for (std::size_t k = 0; k < rows; ++k)
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= i; ++j) {
                const double v = scale * c[static_cast<std::size_t>(i)] *
                                 c[static_cast<std::size_t>(j)];
                a.add(k + i, k + j, i == j ? v : v);
            }
}

/// Accumulates the penalty action h^{2m} DᵀQ_mD x into a long-double buffer
/// using m repeated first differences and their adjoints. On smooth x the
/// repeated differences cancel exactly (nearby-value subtraction is exact),
/// so this form of the residual is far more accurate than multiplying by the
/// assembled band, whose entries carry rounding at the penalty scale.
inline void apply_penalty_accumulate(const Grid& g, int m, double h,
                                     const std::vector<double>& x,
                                     std::vector<long double>& out) {
    const std::size_t n = g.size();
    std::vector<long double> y(x.begin(), x.end());
    std::size_t len = n;
    for (int s = 0; s < m; ++s) {
        for (std::size_t k = 0; k + 1 < len; ++k) y[k] = y[k + 1] - y[k];
        --len;
    }
    // scale h^{2m} δ (Δ^m/δ^m)ᵀ(Δ^m/δ^m) = h^{2m} δ^{1-2m} Δ^{mᵀ}Δ^m
    const long double c =
        std::pow(static_cast<long double>(h), 2 * m) *
        std::pow(static_cast<long double>(g.spacing()), 1 - 2 * m);
    for (std::size_t k = 0; k < len; ++k) y[k] *= c;
    for (int s = 0; s < m; ++s) {
        y[len] = y[len - 1];
        for (std::size_t i = len - 1; i >= 1; --i) y[i] = y[i - 1] - y[i];
        y[0] = -y[0];
        ++len;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] += y[i];
}

/// Factored discretization of (-h²)^m u^{(2m)} + w u with natural boundary
/// conditions, i.e. the variational system (h^{2m} DᵀQ_mD + W Q₀) u = Q₀ v.
/// Factor once per (w, m, h), reuse across right-hand sides.
class BvpOperator {
public:
    BvpOperator(const DesignDensity& w, int m, double h)
        : grid_(w.grid()), m_(m), h_(h) {
        if (m < 1 || m > 4) throw std::invalid_argument("BvpOperator: need 1 <= m <= 4");
        if (!(h > 0.0 && h <= 1.0))
            throw std::invalid_argument("BvpOperator: h must lie in (0,1]");
        if (grid_->intervals() < 8 * static_cast<std::size_t>(m))
            throw std::invalid_argument("BvpOperator: grid too coarse (need N >= 8m)");
        SymmetricBandMatrix a(grid_->size(), static_cast<std::size_t>(m));
        add_penalty_band(a, *grid_, m, h);
        wq_.resize(grid_->size());
        for (std::size_t i = 0; i < grid_->size(); ++i) {
            wq_[i] = w[i] * grid_->weight(i);
            a.add(i, i, wq_[i]);
        }
        chol_ = std::make_unique<BandedCholesky>(a);
    }

    const GridPtr& grid() const { return grid_; }
    int order() const { return m_; }
    double bandwidth_param() const { return h_; }

    /// Solve for right-hand side v given as a grid function: u = M⁻¹ Q₀ v.
    GridFunction apply_inverse(const GridFunction& v) const {
        std::vector<double> rhs(grid_->size());
        for (std::size_t i = 0; i < grid_->size(); ++i) rhs[i] = grid_->weight(i) * v[i];
        return GridFunction(grid_, solve_refined(rhs));
    }

    /// Green's function column: response to a discrete delta of unit mass
    /// at node j (v = e_j / q_j, so Q₀ v = e_j).
    std::vector<double> delta_response(std::size_t j) const {
        std::vector<double> rhs(grid_->size(), 0.0);
        rhs[j] = 1.0;
        return solve_refined(rhs);
    }

private:
    std::vector<double> solve_refined(const std::vector<double>& rhs) const {
        std::vector<double> u = rhs;
        chol_->solve(u);
        refine_solution(
            [this](const std::vector<double>& xv, std::vector<long double>& out) {
                for (std::size_t i = 0; i < xv.size(); ++i)
                    out[i] += static_cast<long double>(wq_[i]) * xv[i];
                apply_penalty_accumulate(*grid_, m_, h_, xv, out);
            },
            *chol_, rhs, u);
        return u;
    }

    GridPtr grid_;
    int m_;
    double h_;
    std::vector<double> wq_;
    std::unique_ptr<BandedCholesky> chol_;
};

inline GridFunction solve_bvp(const GridFunction& v, const DesignDensity& w, int m,
                              double h) {
    const BvpOperator op(w, m, h);
    return op.apply_inverse(v);
}

}  // namespace splinekern

#endif

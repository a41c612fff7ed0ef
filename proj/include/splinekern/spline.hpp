#ifndef SPLINEKERN_SPLINE_HPP
#define SPLINEKERN_SPLINE_HPP

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "splinekern/banded.hpp"
#include "splinekern/bvp.hpp"
#include "splinekern/calculus.hpp"
#include "splinekern/grid.hpp"
#include "splinekern/kernel.hpp"
#include "splinekern/model.hpp"

namespace splinekern {

struct SplineFit {
    GridFunction f;
    int m = 0;
    double h = 0.0;
    double objective = 0.0;       // (1/n)Σ|f(X_i)-Z_i|² + h^{2m}∫(f^{(m)})²
    double residual_norm = 0.0;   // sqrt((1/n)Σ|f(X_i)-Z_i|²)
    std::size_t n = 0;

    double recompute_objective(const std::vector<double>& x,
                               const std::vector<double>& z) const {
        double r = 0.0;
        const int deg = interp_degree(m);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = eval_at(f, x[i], deg) - z[i];
            r += e * e;
        }
        return r / static_cast<double>(x.size()) + penalty_value(f, m, h);
    }
};

/// Penalized least-squares solver for a fixed design: assembles and factors
/// the banded normal equations (1/n)EᵀE + h^{2m}DᵀQ_mD once, then fits any
/// target vector. E is the local-interpolation evaluation operator, so EᵀE
/// only has near-diagonal entries.
class SplineSolver {
public:
    SplineSolver(std::vector<double> x, GridPtr grid, int m, double h)
        : x_(std::move(x)), grid_(std::move(grid)), m_(m), h_(h) {
        if (m < 1 || m > 4) throw std::invalid_argument("SplineSolver: need 1 <= m <= 4");
        if (!(h > 0.0 && h <= 1.0))
            throw std::invalid_argument("SplineSolver: h must lie in (0,1]");
        if (x_.size() < static_cast<std::size_t>(m))
            throw std::invalid_argument(
                "SplineSolver: uniqueness requires n >= m design points");
        const std::size_t nn = grid_->size();
        const int deg = interp_degree(m_);
        const std::size_t kd = static_cast<std::size_t>(deg);
        SymmetricBandMatrix a(nn, kd);
        add_penalty_band(a, *grid_, m_, h_);
        stencils_.reserve(x_.size());
        const double inv_n = 1.0 / static_cast<double>(x_.size());
        for (const double xi : x_) {
            stencils_.push_back(interp_stencil(*grid_, xi, deg));
            const InterpStencil& st = stencils_.back();
            for (std::size_t p = 0; p < st.weights.size(); ++p)
                for (std::size_t q = 0; q <= p; ++q)
                    a.add(st.first + p, st.first + q,
                          inv_n * st.weights[p] * st.weights[q]);
        }
        chol_ = std::make_unique<BandedCholesky>(a);
    }

    const std::vector<double>& design() const { return x_; }
    const GridPtr& grid() const { return grid_; }

    SplineFit fit(const std::vector<double>& z) const {
        if (z.size() != x_.size())
            throw std::invalid_argument("SplineSolver::fit: target length mismatch");
        const double inv_n = 1.0 / static_cast<double>(x_.size());
        std::vector<double> rhs(grid_->size(), 0.0);
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const InterpStencil& st = stencils_[i];
            const double c = inv_n * z[i];
            for (std::size_t p = 0; p < st.weights.size(); ++p)
                rhs[st.first + p] += c * st.weights[p];
        }
        std::vector<double> u = rhs;
        chol_->solve(u);
        refine_solution(
            [this, inv_n](const std::vector<double>& xv, std::vector<long double>& out) {
                for (const InterpStencil& st : stencils_) {
                    long double v = 0.0L;
                    for (std::size_t p = 0; p < st.weights.size(); ++p)
                        v += static_cast<long double>(st.weights[p]) * xv[st.first + p];
                    v *= inv_n;
                    for (std::size_t p = 0; p < st.weights.size(); ++p)
                        out[st.first + p] += static_cast<long double>(st.weights[p]) * v;
                }
                apply_penalty_accumulate(*grid_, m_, h_, xv, out);
            },
            *chol_, rhs, u);
        SplineFit out;
        out.f = GridFunction(grid_, std::move(u));
        out.m = m_;
        out.h = h_;
        out.n = x_.size();
        double rss = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const InterpStencil& st = stencils_[i];
            double v = 0.0;
            for (std::size_t p = 0; p < st.weights.size(); ++p)
                v += st.weights[p] * out.f[st.first + p];
            const double e = v - z[i];
            rss += e * e;
        }
        out.residual_norm = std::sqrt(rss * inv_n);
        out.objective = rss * inv_n + penalty_value(out.f, m_, h_);
        return out;
    }

private:
    std::vector<double> x_;
    GridPtr grid_;
    int m_;
    double h_;
    std::vector<InterpStencil> stencils_;
    std::unique_ptr<BandedCholesky> chol_;
};

inline SplineFit fit_spline(const std::vector<double>& x, const std::vector<double>& z,
                            GridPtr grid, int m, double h) {
    return SplineSolver(x, std::move(grid), m, h).fit(z);
}

/// Discrete noiseless fit f_h = E[f^{nh} | X_1..X_n]: spline fit to the
/// true values at the design points.
inline SplineFit noiseless_fit(const RegressionSample& sample, GridPtr grid, int m,
                               double h) {
    if (!sample.has_truth())
        throw std::invalid_argument("noiseless_fit: sample carries no true values");
    return fit_spline(sample.x, sample.f0, std::move(grid), m, h);
}

/// Pure noise fit φ^{nh}: spline fit to the noise values.
inline SplineFit pure_noise_fit(const std::vector<double>& x,
                                const std::vector<double>& d, GridPtr grid, int m,
                                double h) {
    return fit_spline(x, d, std::move(grid), m, h);
}

/// Continuous noiseless solution φ_h: minimizer of ∫|f-f_o|²w + h^{2m}‖f^{(m)}‖²,
/// i.e. the BVP solution with right-hand side w·f_o.
inline GridFunction continuous_noiseless(const GridFunction& f0, const DesignDensity& w,
                                         int m, double h) {
    GridFunction v = f0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
    return solve_bvp(v, w, m, h);
}

/// Reproducing-kernel sum ψ^{nh}(t) = (1/n) Σ D_i R_wmh(X_i, t).
inline GridFunction cspline_sum(const std::vector<double>& x,
                                const std::vector<double>& d, const KernelOperator& k) {
    if (k.deriv_order() != 0)
        throw std::invalid_argument("cspline_sum: kernel must have derivative order 0");
    if (x.size() != d.size())
        throw std::invalid_argument("cspline_sum: |X| and |D| must match");
    std::vector<double> gamma(k.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        k.accumulate_row_coefficients(gamma, x[i], inv_n * d[i]);
    return k.apply_coefficients(gamma);
}

struct DecompositionResult {
    GridFunction full;        // f^{nh}
    GridFunction noiseless;   // f_h
    GridFunction variance;    // φ^{nh} = f^{nh} − f_h
    GridFunction kernel_sum;  // ψ^{nh}
    GridFunction remainder;   // ε^{nh} = φ^{nh} − ψ^{nh}
    std::optional<GridFunction> bias;  // f_h − f_o when the truth is known

    double full_err_sup = 0.0;   // ‖f^{nh} − f_o‖_∞
    double full_err_wmh = 0.0;   // ‖f^{nh} − f_o‖_wmh
    double variance_sup = 0.0;
    double kernel_sum_sup = 0.0;
    double kernel_sum_wmh = 0.0;
    double remainder_sup = 0.0;
    double remainder_wmh = 0.0;
    double bias_sup = 0.0;
};

/// Error decomposition f^{nh} = f_h + ψ^{nh} + ε^{nh} (exact by construction).
/// `f0_grid`, when given, supplies the truth on the grid for the bias terms.
inline DecompositionResult decompose(const RegressionSample& sample, int m, double h,
                                     const KernelOperator& k,
                                     const GridFunction* f0_grid = nullptr) {
    if (!sample.has_truth())
        throw std::invalid_argument("decompose: sample must carry true values");
    const SplineSolver solver(sample.x, k.grid(), m, h);
    DecompositionResult r;
    r.full = solver.fit(sample.y).f;
    r.noiseless = solver.fit(sample.f0).f;
    r.variance = r.full - r.noiseless;
    r.kernel_sum = cspline_sum(sample.x, sample.noise, k);
    r.remainder = r.variance - r.kernel_sum;

    const GridFunction& w = k.density().values();
    r.variance_sup = sup_norm(r.variance);
    r.kernel_sum_sup = sup_norm(r.kernel_sum);
    r.kernel_sum_wmh = norm_wmh(r.kernel_sum, w, m, h);
    r.remainder_sup = sup_norm(r.remainder);
    r.remainder_wmh = norm_wmh(r.remainder, w, m, h);
    if (f0_grid != nullptr) {
        const GridFunction err = r.full - *f0_grid;
        r.full_err_sup = sup_norm(err);
        r.full_err_wmh = norm_wmh(err, w, m, h);
        r.bias = r.noiseless - *f0_grid;
        r.bias_sup = sup_norm(*r.bias);
    }
    return r;
}

}  // namespace splinekern

#endif

#ifndef SPLINEKERN_BANDED_HPP
#define SPLINEKERN_BANDED_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace splinekern {

/// Symmetric band matrix, lower-triangle storage: band(i, d) = A[i][i-d],
/// 0 <= d <= kd, d <= i.
class SymmetricBandMatrix {
public:
    SymmetricBandMatrix(std::size_t n, std::size_t kd)
        : n_(n), kd_(kd), data_(n * (kd + 1), 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t bandwidth() const { return kd_; }

    double& at(std::size_t i, std::size_t d) { return data_[i * (kd_ + 1) + d]; }
    double at(std::size_t i, std::size_t d) const { return data_[i * (kd_ + 1) + d]; }

    /// Add v to A[i][j] (and implicitly A[j][i]); requires |i-j| <= kd.
    void add(std::size_t i, std::size_t j, double v) {
        if (j > i) std::swap(i, j);
        const std::size_t d = i - j;
        if (d > kd_) throw std::logic_error("SymmetricBandMatrix::add outside band");
        data_[i * (kd_ + 1) + d] += v;
    }

    double get(std::size_t i, std::size_t j) const {
        if (j > i) std::swap(i, j);
        const std::size_t d = i - j;
        return d > kd_ ? 0.0 : data_[i * (kd_ + 1) + d];
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t dmax = std::min(kd_, i);
            for (std::size_t d = 0; d <= dmax; ++d) {
                const double v = data_[i * (kd_ + 1) + d];
                y[i] += v * x[i - d];
                if (d != 0) y[i - d] += v * x[i];
            }
        }
        return y;
    }

private:
    std::size_t n_, kd_;
    std::vector<double> data_;
};

/// Banded Cholesky factor L (A = L Lᵀ), reusable across right-hand sides.
class BandedCholesky {
public:
    explicit BandedCholesky(const SymmetricBandMatrix& a)
        : n_(a.size()), kd_(a.bandwidth()), l_(n_ * (kd_ + 1), 0.0) {
        // copy band, then factor in place
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t d = 0; d <= std::min(kd_, i); ++d)
                l_[i * (kd_ + 1) + d] = a.at(i, d);
        for (std::size_t j = 0; j < n_; ++j) {
            double diag = lval(j, j);
            const std::size_t k0 = (j > kd_) ? j - kd_ : 0;
            for (std::size_t k = k0; k < j; ++k) {
                const double v = lval(j, k);
                diag -= v * v;
            }
            if (!(diag > 0.0))
                throw std::runtime_error("BandedCholesky: matrix not positive definite");
            const double dj = std::sqrt(diag);
            lref(j, j) = dj;
            const std::size_t imax = std::min(n_ - 1, j + kd_);
            for (std::size_t i = j + 1; i <= imax; ++i) {
                double s = lval(i, j);
                const std::size_t kk0 = (i > kd_) ? i - kd_ : 0;
                for (std::size_t k = std::max(kk0, k0); k < j; ++k)
                    s -= lval(i, k) * lval(j, k);
                lref(i, j) = s / dj;
            }
        }
    }

    std::size_t size() const { return n_; }

    /// Solve A x = b in place.
    void solve(std::vector<double>& b) const {
        // forward: L y = b
        for (std::size_t i = 0; i < n_; ++i) {
            double s = b[i];
            const std::size_t k0 = (i > kd_) ? i - kd_ : 0;
            for (std::size_t k = k0; k < i; ++k) s -= lval(i, k) * b[k];
            b[i] = s / lval(i, i);
        }
        // backward: Lᵀ x = y
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = b[ii];
            const std::size_t imax = std::min(n_ - 1, ii + kd_);
            for (std::size_t k = ii + 1; k <= imax; ++k) s -= lval(k, ii) * b[k];
            b[ii] = s / lval(ii, ii);
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> x = b;
        solve(x);
        return x;
    }

private:
    double lval(std::size_t i, std::size_t j) const { return l_[i * (kd_ + 1) + (i - j)]; }
    double& lref(std::size_t i, std::size_t j) { return l_[i * (kd_ + 1) + (i - j)]; }

    std::size_t n_, kd_;
    std::vector<double> l_;
};

/// Iterative refinement: recovers accuracy lost to the strong penalty/data
/// scale separation in the normal equations. `apply_a` must accumulate A·x
/// into a long-double buffer using the *factored* form of the operator
/// (repeated differences, per-point stencils): residuals computed against the
/// assembled band would be polluted by its own assembly rounding, which caps
/// the attainable accuracy at cond(A)·eps no matter how many steps run.
/// Stops when the corrections stop contracting.
template <typename ApplyFn>
inline void refine_solution(ApplyFn&& apply_a, const BandedCholesky& chol,
                            const std::vector<double>& rhs, std::vector<double>& x) {
    const std::size_t n = rhs.size();
    std::vector<long double> ax(n);
    std::vector<double> r(n);
    double prev_corr = 0.0;
    for (int step = 0; step < 12; ++step) {
        std::fill(ax.begin(), ax.end(), 0.0L);
        apply_a(x, ax);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = static_cast<double>(static_cast<long double>(rhs[i]) - ax[i]);
        chol.solve(r);
        double corr = 0.0, xn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            corr = std::max(corr, std::abs(r[i]));
            xn = std::max(xn, std::abs(x[i]));
        }
        // a non-contracting correction means stagnation (or divergence when
        // the factorization is too inaccurate to precondition): keep x as is
        if (step > 0 && corr >= prev_corr) break;
        for (std::size_t i = 0; i < n; ++i) x[i] += r[i];
        if (corr <= 1e-17 * xn) break;
        prev_corr = corr;
    }
}

}  // namespace splinekern

#endif

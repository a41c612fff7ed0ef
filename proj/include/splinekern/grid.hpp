#ifndef SPLINEKERN_GRID_HPP
#define SPLINEKERN_GRID_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace splinekern {

/// Uniform grid on [0,1] with composite-trapezoid quadrature weights.
class Grid {
public:
    explicit Grid(std::size_t n_intervals) : n_(n_intervals) {
        if (n_intervals < 4)
            throw std::invalid_argument("Grid: need at least 4 intervals");
        delta_ = 1.0 / static_cast<double>(n_);
        nodes_.resize(n_ + 1);
        weights_.resize(n_ + 1, delta_);
        for (std::size_t i = 0; i <= n_; ++i)
            nodes_[i] = static_cast<double>(i) * delta_;
        nodes_.back() = 1.0;
        weights_.front() = weights_.back() = 0.5 * delta_;
    }

    std::size_t intervals() const { return n_; }
    std::size_t size() const { return n_ + 1; }
    double spacing() const { return delta_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::size_t n_;
    double delta_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(std::size_t n_intervals) {
    if (n_intervals < 8)
        throw std::invalid_argument("make_grid: N must be at least 8");
    return std::make_shared<const Grid>(n_intervals);
}

// Test helper: permits the tiny grids used in hand-checked examples.
inline GridPtr make_grid_unchecked(std::size_t n_intervals) {
    return std::make_shared<const Grid>(n_intervals);
}

/// One real value per grid node.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridPtr grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_->size())
            throw std::invalid_argument("GridFunction: length mismatch with grid");
    }
    GridFunction(GridPtr grid, double constant)
        : grid_(std::move(grid)), values_(grid_->size(), constant) {}

    template <class F>
    static GridFunction tabulate(GridPtr grid, F&& f) {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
        return GridFunction(std::move(grid), std::move(v));
    }

    const GridPtr& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    GridFunction& operator+=(const GridFunction& other) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& other) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
        return *this;
    }
    GridFunction& operator*=(double a) {
        for (double& v : values_) v *= a;
        return *this;
    }

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double a, GridFunction f) { return f *= a; }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Trapezoid quadrature of a grid function.
inline double integrate(const GridFunction& f) {
    const Grid& g = *f.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * f[i];
    return s;
}

inline double sup_norm(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values()) s = std::max(s, std::abs(v));
    return s;
}

/// Local Lagrange interpolation stencil at an off-grid point.
/// `degree` consecutive+1 nodes, degree = max(3, m+1) in this library.
struct InterpStencil {
    std::size_t first;             // index of first node in the stencil
    std::vector<double> weights;   // one weight per stencil node
};

inline InterpStencil interp_stencil(const Grid& g, double x, int degree) {
    if (degree < 1) throw std::invalid_argument("interp_stencil: degree < 1");
    const std::size_t p = static_cast<std::size_t>(degree) + 1;  // node count
    if (p > g.size()) throw std::invalid_argument("interp_stencil: grid too coarse");
    x = std::min(1.0, std::max(0.0, x));
    // center the stencil on x, clamped to the grid
    double pos = x / g.spacing();
    long lo = static_cast<long>(std::floor(pos)) - (static_cast<long>(p) - 1) / 2;
    lo = std::max<long>(0, std::min<long>(lo, static_cast<long>(g.size() - p)));
    InterpStencil st;
    st.first = static_cast<std::size_t>(lo);
    st.weights.resize(p);
    for (std::size_t a = 0; a < p; ++a) {
        double w = 1.0;
        const double xa = g.node(st.first + a);
        for (std::size_t b = 0; b < p; ++b) {
            if (b == a) continue;
            const double xb = g.node(st.first + b);
            w *= (x - xb) / (xa - xb);
        }
        st.weights[a] = w;
    }
    return st;
}

/// Point evaluation E_x f by local polynomial interpolation.
inline double eval_at(const GridFunction& f, double x, int degree = 3) {
    const InterpStencil st = interp_stencil(*f.grid(), x, degree);
    double s = 0.0;
    for (std::size_t a = 0; a < st.weights.size(); ++a)
        s += st.weights[a] * f[st.first + a];
    return s;
}

inline int interp_degree(int m) { return std::max(3, m + 1); }

}  // namespace splinekern

#endif

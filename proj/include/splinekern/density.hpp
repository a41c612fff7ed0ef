#ifndef SPLINEKERN_DENSITY_HPP
#define SPLINEKERN_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "splinekern/grid.hpp"

namespace splinekern {

/// Design density w on [0,1], bounded away from zero, with its cdf W.
/// Sampling goes through the inverse cdf (piecewise linear between nodes).
class DesignDensity {
public:
    DesignDensity(GridFunction w, std::string name = "")
        : w_(std::move(w)), name_(std::move(name)) {
        const Grid& g = *w_.grid();
        w1_ = w2_ = w_[0];
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(w_[i] > 0.0))
                throw std::invalid_argument("DesignDensity: w must be strictly positive");
            w1_ = std::min(w1_, w_[i]);
            w2_ = std::max(w2_, w_[i]);
        }
        const double mass = integrate(w_);
        if (std::abs(mass - 1.0) > 1e-8)
            throw std::invalid_argument("DesignDensity: density must integrate to 1");
        // trapezoid cumulative
        std::vector<double> cdf(g.size());
        cdf[0] = 0.0;
        for (std::size_t i = 1; i < g.size(); ++i)
            cdf[i] = cdf[i - 1] + 0.5 * g.spacing() * (w_[i - 1] + w_[i]);
        const double total = cdf.back();
        for (double& c : cdf) c /= total;
        cdf_ = GridFunction(w_.grid(), std::move(cdf));
    }

    const GridFunction& values() const { return w_; }
    const GridFunction& cdf() const { return cdf_; }
    const GridPtr& grid() const { return w_.grid(); }
    double lower_bound() const { return w1_; }
    double upper_bound() const { return w2_; }
    const std::string& name() const { return name_; }
    double operator[](std::size_t i) const { return w_[i]; }

    /// Inverse cdf with linear interpolation between grid nodes.
    double quantile(double u) const {
        u = std::min(1.0, std::max(0.0, u));
        const auto& c = cdf_.values();
        const auto it = std::lower_bound(c.begin(), c.end(), u);
        if (it == c.begin()) return 0.0;
        if (it == c.end()) return 1.0;
        const std::size_t i = static_cast<std::size_t>(it - c.begin());
        const double c0 = c[i - 1], c1 = c[i];
        const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
        return w_.grid()->node(i - 1) + frac * w_.grid()->spacing();
    }

    /// Expected value of w^{nh}(t) style integrals need w at off-grid points.
    double eval(double x) const { return eval_at(w_, x); }

private:
    GridFunction w_;
    GridFunction cdf_;
    double w1_ = 0.0, w2_ = 0.0;
    std::string name_;
};

inline DesignDensity uniform_density(GridPtr grid) {
    return DesignDensity(GridFunction(std::move(grid), 1.0), "uniform");
}

/// w(t) = (2/3)(1+t)
inline DesignDensity tilted_density(GridPtr grid) {
    auto w = GridFunction::tabulate(std::move(grid),
                                    [](double t) { return (2.0 / 3.0) * (1.0 + t); });
    return DesignDensity(std::move(w), "tilted");
}

/// Normal(mu, sigma) restricted to [0,1] and renormalized by quadrature.
inline DesignDensity truncated_normal_density(GridPtr grid, double mu = 0.5,
                                              double sigma = 0.35) {
    auto w = GridFunction::tabulate(grid, [=](double t) {
        const double z = (t - mu) / sigma;
        return std::exp(-0.5 * z * z);
    });
    const double mass = integrate(w);
    for (double& v : w.values()) v /= mass;
    return DesignDensity(std::move(w), "truncated_normal");
}

inline DesignDensity named_density(const std::string& name, GridPtr grid) {
    if (name == "uniform") return uniform_density(std::move(grid));
    if (name == "tilted") return tilted_density(std::move(grid));
    if (name == "truncated_normal") return truncated_normal_density(std::move(grid));
    throw std::invalid_argument("unknown density: " + name);
}

}  // namespace splinekern

#endif

#ifndef SPLINEKERN_MODEL_HPP
#define SPLINEKERN_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "splinekern/density.hpp"
#include "splinekern/grid.hpp"
#include "splinekern/rng.hpp"

namespace splinekern {

enum class NoiseFamily { gaussian, student_t, pareto };

inline std::string to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::student_t: return "student_t";
        case NoiseFamily::pareto: return "pareto";
    }
    return "?";
}

inline NoiseFamily noise_family_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseFamily::gaussian;
    if (s == "student_t") return NoiseFamily::student_t;
    if (s == "pareto") return NoiseFamily::pareto;
    throw std::invalid_argument("unknown noise family: " + s);
}

/// Noise menu with known moment orders. Unit draws are standardized to
/// variance 1 so that M = sup σ²(x).
class NoiseSpec {
public:
    /// tail: d.o.f. ν for student_t, tail index α for pareto; ignored for gaussian.
    NoiseSpec(NoiseFamily family, GridFunction scale, double kappa, double tail = 0.0)
        : family_(family), scale_(std::move(scale)), kappa_(kappa), tail_(tail) {
        if (!(kappa_ > 2.0))
            throw std::invalid_argument("NoiseSpec: (1.7) requires kappa > 2");
        switch (family_) {
            case NoiseFamily::gaussian:
                break;  // all moments finite
            case NoiseFamily::student_t:
                if (!(tail_ > 2.0))
                    throw std::invalid_argument("NoiseSpec: student_t needs nu > 2");
                if (!(kappa_ < tail_))
                    throw std::invalid_argument(
                        "NoiseSpec: declared kappa must be below the t d.o.f.");
                break;
            case NoiseFamily::pareto:
                if (!(tail_ > 2.0))
                    throw std::invalid_argument("NoiseSpec: pareto needs tail index > 2");
                if (!(kappa_ < tail_))
                    throw std::invalid_argument(
                        "NoiseSpec: declared kappa must be below the tail index");
                break;
        }
        double smax = 0.0;
        for (double v : scale_.values()) smax = std::max(smax, std::abs(v));
        second_moment_bound_ = smax * smax;  // unit-variance draws
        if (!std::isfinite(second_moment_bound_))
            throw std::invalid_argument("NoiseSpec: scale function not finite");
    }

    static NoiseSpec constant_scale(GridPtr grid, NoiseFamily family, double sigma,
                                    double kappa, double tail = 0.0) {
        return NoiseSpec(family, GridFunction(std::move(grid), sigma), kappa, tail);
    }

    NoiseFamily family() const { return family_; }
    double kappa() const { return kappa_; }
    double tail() const { return tail_; }
    double second_moment_bound() const { return second_moment_bound_; }
    const GridFunction& scale() const { return scale_; }
    double scale_at(double x) const { return eval_at(scale_, x); }

    /// Variance-1 draw from the chosen family.
    double unit_draw(Rng& rng) const {
        switch (family_) {
            case NoiseFamily::gaussian:
                return rng.gaussian();
            case NoiseFamily::student_t:
                return rng.student_t(tail_) * std::sqrt((tail_ - 2.0) / tail_);
            case NoiseFamily::pareto: {
                // symmetric, |Z| = U^{-1/alpha} with E|Z|^2 = alpha/(alpha-2)
                const double u = rng.uniform();
                const double mag = std::pow(rng.uniform(), -1.0 / tail_);
                const double sgn = (u < 0.5) ? -1.0 : 1.0;
                return sgn * mag * std::sqrt((tail_ - 2.0) / tail_);
            }
        }
        return 0.0;
    }

private:
    NoiseFamily family_;
    GridFunction scale_;
    double kappa_;
    double tail_;
    double second_moment_bound_;
};

/// Named regression function with a known m-th derivative sup-norm.
struct RegressionFunction {
    std::string name;
    std::function<double(double)> f;

    static RegressionFunction named(const std::string& name) {
        if (name == "sin2pi")
            return {name, [](double t) { return std::sin(2.0 * M_PI * t); }};
        if (name == "cospi")
            return {name, [](double t) { return std::cos(M_PI * t); }};
        if (name == "bump")
            return {name, [](double t) {
                        const double z = (t - 0.5) / 0.15;
                        return std::exp(-0.5 * z * z);
                    }};
        if (name == "poly3")
            return {name, [](double t) { return t * (1.0 - t) * (2.0 * t - 0.3); }};
        if (name == "zero") return {name, [](double) { return 0.0; }};
        throw std::invalid_argument("unknown regression function: " + name);
    }

    GridFunction tabulate(GridPtr grid) const { return GridFunction::tabulate(grid, f); }
};

struct ModelConfig {
    RegressionFunction f0;
    DesignDensity density;
    NoiseSpec noise;
    std::size_t n;
    std::uint64_t seed;
};

struct RegressionSample {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> f0;     // true values f_o(X_i); empty if unknown
    std::vector<double> noise;  // D_i = Y_i - f_o(X_i); empty if unknown
    std::uint64_t seed = 0;

    std::size_t size() const { return x.size(); }
    bool has_truth() const { return !f0.empty(); }
};

/// X_i iid from the design density (inverse cdf), D_i from the noise spec
/// conditionally on X_i, Y_i = f_o(X_i) + D_i. Deterministic given seed.
inline RegressionSample sample_regression(const ModelConfig& config) {
    RegressionSample s;
    s.seed = config.seed;
    s.x.resize(config.n);
    s.y.resize(config.n);
    s.f0.resize(config.n);
    s.noise.resize(config.n);
    Rng rng(config.seed);
    for (std::size_t i = 0; i < config.n; ++i) {
        const double xi = config.density.quantile(rng.uniform());
        const double fi = config.f0.f(xi);
        const double di = config.noise.scale_at(xi) * config.noise.unit_draw(rng);
        s.x[i] = xi;
        s.f0[i] = fi;
        s.noise[i] = di;
        s.y[i] = fi + di;
    }
    return s;
}

}  // namespace splinekern

#endif

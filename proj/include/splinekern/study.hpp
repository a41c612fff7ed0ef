#ifndef SPLINEKERN_STUDY_HPP
#define SPLINEKERN_STUDY_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "splinekern/bandwidth.hpp"
#include "splinekern/estimators.hpp"
#include "splinekern/kernel.hpp"
#include "splinekern/model.hpp"
#include "splinekern/rng.hpp"
#include "splinekern/spline.hpp"
#include "splinekern/stats.hpp"

namespace splinekern {

/// log(1/h) ∨ log log n, the polylog factor of all the uniform bounds.
inline double polylog_factor(std::size_t n, double h) {
    return std::max(std::log(1.0 / h), std::log(std::log(static_cast<double>(n))));
}

/// sqrt((nh)^{-1} {log(1/h) ∨ log log n}), the variance-scale denominator.
inline double variance_scale(std::size_t n, double h) {
    return std::sqrt(polylog_factor(n, h) / (static_cast<double>(n) * h));
}

struct ModelSpec {
    std::string f0_name = "sin2pi";
    std::string density_name = "uniform";
    NoiseFamily noise_family = NoiseFamily::gaussian;
    double noise_sigma = 0.3;
    double kappa = 4.0;
    double noise_tail = 0.0;  // nu or pareto index when applicable
};

struct StudySpec {
    ModelSpec model;
    int m = 2;
    RangeKind kind = RangeKind::H;
    double gamma = 1.0;
    double lambda = 0.0;  // 0 = midpoint default for the G range
    std::vector<std::size_t> n_list;
    std::size_t h_count = 15;
    std::size_t replications = 50;
    std::size_t grid_intervals = 2000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    // optional rule override: single h per n, h = (log n / n)^{1/(2m+1)}
    bool optimal_h_rule = false;

    double range_parameter() const {
        if (kind == RangeKind::G)
            return lambda > 0.0 ? lambda : default_lambda(model.kappa);
        return model.kappa;
    }
};

struct RateRow {
    std::size_t n = 0;
    std::size_t h_index = 0;
    double h = 0.0;
    std::size_t rep = 0;
    double remainder_sup = 0.0;   // ‖ε^{nh}‖_∞
    double remainder_wmh = 0.0;
    double kernel_sum_sup = 0.0;  // ‖ψ^{nh}‖_∞ = ‖S_nh‖_∞
    double kernel_sum_wmh = 0.0;
    double err_sup = 0.0;         // ‖f^{nh} − f_o‖_∞
    double err_wmh = 0.0;
    double bias_sup = 0.0;        // ‖f_h − f_o‖_∞
    double cbias_sup = 0.0;       // ‖φ_h − f_o‖_∞ (per (n,h), no sampling)
    double deriv_sum_sup = 0.0;   // h^m ‖S^{(m)}_nh‖_∞
};

struct RateReport {
    StudySpec spec;
    std::vector<std::vector<double>> h_per_n;  // grids actually used
    std::vector<RateRow> rows;
    std::size_t failures = 0;
};

namespace detail {

inline std::vector<double> study_bandwidths(const StudySpec& spec, std::size_t n) {
    if (spec.optimal_h_rule) {
        const double nn = static_cast<double>(n);
        return {std::pow(std::log(nn) / nn, 1.0 / (2.0 * spec.m + 1.0))};
    }
    return bandwidth_grid(spec.kind, spec.gamma, n, spec.range_parameter(), spec.m,
                          spec.h_count)
        .values;
}

inline ModelConfig make_model_config(const StudySpec& spec, const DesignDensity& density,
                                     std::size_t n, std::uint64_t seed) {
    return ModelConfig{RegressionFunction::named(spec.model.f0_name), density,
                       NoiseSpec::constant_scale(density.grid(), spec.model.noise_family,
                                                 spec.model.noise_sigma, spec.model.kappa,
                                                 spec.model.noise_tail),
                       n, seed};
}

}  // namespace detail

/// Monte Carlo sweep over (n, h, replication). Deterministic given the
/// master seed: replication r at (n_index, h_index) draws from a substream
/// derived from (seed, n, h_index, r), so results do not depend on the
/// thread count or scheduling.
inline RateReport run_study(const StudySpec& spec) {
    if (spec.n_list.empty()) throw std::invalid_argument("run_study: empty n list");
    if (spec.replications == 0) throw std::invalid_argument("run_study: no replications");
    RateReport report;
    report.spec = spec;

    const GridPtr grid = make_grid(spec.grid_intervals);
    const auto density = std::make_shared<const DesignDensity>(
        named_density(spec.model.density_name, grid));
    const GridFunction f0_grid =
        RegressionFunction::named(spec.model.f0_name).tabulate(grid);

    for (const std::size_t n : spec.n_list) {
        const std::vector<double> hs = detail::study_bandwidths(spec, n);
        report.h_per_n.push_back(hs);
        for (std::size_t hi = 0; hi < hs.size(); ++hi) {
            const double h = hs[hi];
            const KernelOperator k = greens_operator(density, spec.m, h);
            const KernelOperator km = kernel_derivative(k, spec.m);
            const GridFunction phi_h = continuous_noiseless(f0_grid, *density, spec.m, h);
            const double cbias = sup_norm(phi_h - f0_grid);
            const double hm = std::pow(h, spec.m);

            std::vector<RateRow> rows(spec.replications);
            std::size_t failures = 0;
            auto worker = [&](std::size_t r0, std::size_t r1, std::size_t* fail) {
                for (std::size_t r = r0; r < r1; ++r) {
                    const std::uint64_t sub =
                        derive_seed(spec.seed, n, hi + 1, r + 1);
                    try {
                        const ModelConfig mc =
                            detail::make_model_config(spec, *density, n, sub);
                        const RegressionSample sample = sample_regression(mc);
                        DecompositionResult dec =
                            decompose(sample, spec.m, h, k, &f0_grid);
                        RateRow row;
                        row.n = n;
                        row.h_index = hi;
                        row.h = h;
                        row.rep = r;
                        row.remainder_sup = dec.remainder_sup;
                        row.remainder_wmh = dec.remainder_wmh;
                        row.kernel_sum_sup = dec.kernel_sum_sup;
                        row.kernel_sum_wmh = dec.kernel_sum_wmh;
                        row.err_sup = dec.full_err_sup;
                        row.err_wmh = dec.full_err_wmh;
                        row.bias_sup = dec.bias_sup;
                        row.cbias_sup = cbias;
                        row.deriv_sum_sup =
                            hm * sup_norm(rk_sum(sample.x, sample.noise, km));
                        rows[r] = row;
                    } catch (const std::exception&) {
                        rows[r].n = 0;  // marks a failed replication
                        ++*fail;
                    }
                }
            };
            const unsigned nthreads =
                std::max(1u, std::min<unsigned>(spec.threads,
                                                static_cast<unsigned>(spec.replications)));
            if (nthreads == 1) {
                worker(0, spec.replications, &failures);
            } else {
                std::vector<std::thread> pool;
                std::vector<std::size_t> fails(nthreads, 0);
                const std::size_t chunk =
                    (spec.replications + nthreads - 1) / nthreads;
                for (unsigned t = 0; t < nthreads; ++t) {
                    const std::size_t r0 = t * chunk;
                    const std::size_t r1 = std::min(spec.replications, r0 + chunk);
                    if (r0 >= r1) break;
                    pool.emplace_back(worker, r0, r1, &fails[t]);
                }
                for (auto& th : pool) th.join();
                for (const std::size_t f : fails) failures += f;
            }
            for (const RateRow& row : rows)
                if (row.n != 0) report.rows.push_back(row);
            report.failures += failures;
        }
    }
    return report;
}

enum class RateStatistic { T_UE, Q_UE, frak_Q_UE, Q_inf_0, Q_inf_m, Q_wm, bias_T7 };

inline std::string to_string(RateStatistic s) {
    switch (s) {
        case RateStatistic::T_UE: return "T_UE";
        case RateStatistic::Q_UE: return "Q_UE";
        case RateStatistic::frak_Q_UE: return "frakQ_UE";
        case RateStatistic::Q_inf_0: return "Q_inf_0";
        case RateStatistic::Q_inf_m: return "Q_inf_m";
        case RateStatistic::Q_wm: return "Q_wm";
        case RateStatistic::bias_T7: return "bias_T7";
    }
    return "?";
}

inline RangeKind required_range(RateStatistic s) {
    switch (s) {
        case RateStatistic::Q_UE:
        case RateStatistic::bias_T7: return RangeKind::G;
        case RateStatistic::frak_Q_UE: return RangeKind::F;
        default: return RangeKind::H;
    }
}

inline double statistic_ratio(RateStatistic s, const RateRow& row, int m) {
    const double vs = variance_scale(row.n, row.h);
    switch (s) {
        case RateStatistic::T_UE: {
            const double den = vs * vs * std::sqrt(1.0 / row.h);  // h^{-1/2}(nh)^{-1}L
            return row.remainder_sup / den;
        }
        case RateStatistic::Q_UE:
            return row.err_sup / std::sqrt(std::pow(row.h, 2 * m) + vs * vs);
        case RateStatistic::frak_Q_UE:
            return row.err_sup / vs;
        case RateStatistic::Q_inf_0:
            return row.kernel_sum_sup / vs;
        case RateStatistic::Q_inf_m:
            return row.deriv_sum_sup / vs;
        case RateStatistic::Q_wm:
            return row.kernel_sum_wmh / vs;
        case RateStatistic::bias_T7:
            return row.bias_sup / std::sqrt(std::pow(row.h, 2 * m) + vs * vs);
    }
    return 0.0;
}

struct PerNStatistic {
    std::vector<std::size_t> n;
    std::vector<double> max_ratio;     // max over h and replications
    std::vector<double> median_ratio;  // median over h and replications
};

/// Per-n aggregates of a theorem's ratio; the sequences feed trend tests.
inline PerNStatistic rate_statistic(const RateReport& report, RateStatistic which,
                                    bool enforce_range = true) {
    if (enforce_range && !report.spec.optimal_h_rule &&
        report.spec.kind != required_range(which))
        throw std::invalid_argument("rate_statistic: report h-range kind " +
                                    to_string(report.spec.kind) + " does not match " +
                                    to_string(which));
    PerNStatistic out;
    for (const std::size_t n : report.spec.n_list) {
        std::vector<double> ratios;
        for (const RateRow& row : report.rows)
            if (row.n == n) ratios.push_back(statistic_ratio(which, row, report.spec.m));
        if (ratios.empty()) continue;
        out.n.push_back(n);
        double mx = 0.0;
        for (const double r : ratios) mx = std::max(mx, r);
        out.max_ratio.push_back(mx);
        out.median_ratio.push_back(median(ratios));
    }
    return out;
}

enum class NormField { err_wmh, err_sup, remainder_sup, kernel_sum_sup, bias_sup };

inline double norm_field_value(NormField f, const RateRow& row) {
    switch (f) {
        case NormField::err_wmh: return row.err_wmh;
        case NormField::err_sup: return row.err_sup;
        case NormField::remainder_sup: return row.remainder_sup;
        case NormField::kernel_sum_sup: return row.kernel_sum_sup;
        case NormField::bias_sup: return row.bias_sup;
    }
    return 0.0;
}

struct RateRegression {
    double slope = 0.0;
    double ci_lo = 0.0;  // bootstrap 90% interval
    double ci_hi = 0.0;
};

/// OLS of log(median norm) on log(n⁻¹ log n). `norms_per_n[i]` holds the
/// replication norms at the rule bandwidth for n_list[i].
inline RateRegression rate_regression_from_norms(
    const std::vector<std::size_t>& n_list,
    const std::vector<std::vector<double>>& norms_per_n, std::uint64_t seed = 7,
    std::size_t bootstrap = 400) {
    if (n_list.size() < 3)
        throw std::invalid_argument("rate_regression: need at least 3 distinct n");
    if (norms_per_n.size() != n_list.size())
        throw std::invalid_argument("rate_regression: input size mismatch");
    std::vector<double> lx(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const double nn = static_cast<double>(n_list[i]);
        lx[i] = std::log(std::log(nn) / nn);
    }
    auto slope_of = [&](const std::vector<std::vector<double>>& norms) {
        std::vector<double> ly(n_list.size());
        for (std::size_t i = 0; i < n_list.size(); ++i) ly[i] = std::log(median(norms[i]));
        return ols(lx, ly).slope;
    };
    RateRegression out;
    out.slope = slope_of(norms_per_n);
    std::vector<double> boot(bootstrap);
    Rng rng(seed);
    std::vector<std::vector<double>> resampled(n_list.size());
    for (std::size_t b = 0; b < bootstrap; ++b) {
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            const auto& src = norms_per_n[i];
            resampled[i].resize(src.size());
            for (std::size_t r = 0; r < src.size(); ++r)
                resampled[i][r] =
                    src[static_cast<std::size_t>(rng.uniform() * src.size()) % src.size()];
        }
        boot[b] = slope_of(resampled);
    }
    out.ci_lo = percentile(boot, 0.05);
    out.ci_hi = percentile(boot, 0.95);
    return out;
}

inline RateRegression rate_regression(const RateReport& report, NormField field,
                                      std::uint64_t seed = 7) {
    std::vector<std::vector<double>> norms(report.spec.n_list.size());
    for (std::size_t i = 0; i < report.spec.n_list.size(); ++i)
        for (const RateRow& row : report.rows)
            if (row.n == report.spec.n_list[i])
                norms[i].push_back(norm_field_value(field, row));
    return rate_regression_from_norms(report.spec.n_list, norms, seed);
}

struct ConfidenceBand {
    GridFunction lower;
    GridFunction upper;
    double half_width = 0.0;
};

/// f^{nh} ± Q·sqrt((nh)^{-1}{log(1/h) ∨ log log n}). Requires h inside the
/// F-range so the bias term is negligible.
inline ConfidenceBand confidence_band(const SplineFit& fit, std::size_t n, double h,
                                      double q, double kappa, double gamma = 1.0) {
    const BandwidthInterval iv =
        bandwidth_interval(RangeKind::F, gamma, n, kappa, fit.m);
    if (h < iv.lo || h > iv.hi)
        throw std::invalid_argument(
            "confidence_band: h outside F-range: bias not negligible (allowed [" +
            std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "])");
    ConfidenceBand band{fit.f, fit.f, q * variance_scale(n, h)};
    for (std::size_t i = 0; i < fit.f.size(); ++i) {
        band.lower[i] -= band.half_width;
        band.upper[i] += band.half_width;
    }
    return band;
}

}  // namespace splinekern

#endif

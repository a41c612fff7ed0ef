#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "splinekern/study.hpp"

using namespace splinekern;

namespace {

StudySpec small_spec() {
    StudySpec spec;
    spec.model.f0_name = "sin2pi";
    spec.model.density_name = "uniform";
    spec.model.noise_family = NoiseFamily::gaussian;
    spec.model.noise_sigma = 0.3;
    spec.model.kappa = 4.0;
    spec.m = 2;
    spec.kind = RangeKind::H;
    spec.n_list = {200};
    spec.replications = 8;
    spec.grid_intervals = 300;
    spec.seed = 11;
    spec.optimal_h_rule = true;  // one bandwidth per n keeps the test fast
    return spec;
}

bool rows_equal(const RateRow& a, const RateRow& b) {
    return a.n == b.n && a.h_index == b.h_index && a.h == b.h && a.rep == b.rep &&
           a.remainder_sup == b.remainder_sup && a.remainder_wmh == b.remainder_wmh &&
           a.kernel_sum_sup == b.kernel_sum_sup && a.kernel_sum_wmh == b.kernel_sum_wmh &&
           a.err_sup == b.err_sup && a.err_wmh == b.err_wmh && a.bias_sup == b.bias_sup &&
           a.cbias_sup == b.cbias_sup && a.deriv_sum_sup == b.deriv_sum_sup;
}

}  // namespace

TEST_CASE("polylog factor and variance scale oracles") {
    CHECK(polylog_factor(10000, 0.05) == Catch::Approx(std::log(20.0)).epsilon(1e-12));
    CHECK(polylog_factor(10000, 0.5) ==
          Catch::Approx(std::log(std::log(10000.0))).epsilon(1e-12));
    CHECK(variance_scale(10000, 0.05) ==
          Catch::Approx(std::sqrt(std::log(20.0) / 500.0)).epsilon(1e-12));
}

TEST_CASE("zero-noise study produces exactly zero variance statistics") {
    StudySpec spec = small_spec();
    spec.model.noise_sigma = 0.0;
    spec.replications = 3;
    const auto report = run_study(spec);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.failures == 0);
    for (const auto& row : report.rows) {
        CHECK(row.kernel_sum_sup == 0.0);
        CHECK(row.remainder_sup == 0.0);
        CHECK(row.deriv_sum_sup == 0.0);
        CHECK(row.err_sup == row.bias_sup);  // f^{nh} = f_h without noise
        CHECK(row.cbias_sup > 0.0);
    }
}

TEST_CASE("a single replication reproduces a direct decomposition") {
    StudySpec spec = small_spec();
    spec.replications = 1;
    const auto report = run_study(spec);
    REQUIRE(report.rows.size() == 1);
    const RateRow& row = report.rows[0];

    const auto grid = make_grid(spec.grid_intervals);
    const auto w = std::make_shared<const DesignDensity>(uniform_density(grid));
    const auto k = greens_operator(w, spec.m, row.h);
    const auto f0_grid = RegressionFunction::named("sin2pi").tabulate(grid);
    const ModelConfig mc{RegressionFunction::named("sin2pi"), *w,
                         NoiseSpec::constant_scale(grid, NoiseFamily::gaussian, 0.3, 4.0),
                         200, derive_seed(spec.seed, 200, 1, 1)};
    const auto sample = sample_regression(mc);
    const auto dec = decompose(sample, spec.m, row.h, k, &f0_grid);
    CHECK(row.remainder_sup == dec.remainder_sup);
    CHECK(row.kernel_sum_sup == dec.kernel_sum_sup);
    CHECK(row.err_sup == dec.full_err_sup);
    CHECK(row.bias_sup == dec.bias_sup);
}

TEST_CASE("study output is deterministic and independent of the thread count") {
    StudySpec spec = small_spec();
    const auto a = run_study(spec);
    spec.threads = 3;
    const auto b = run_study(spec);
    spec.threads = 8;
    const auto c = run_study(spec);
    REQUIRE(a.rows.size() == b.rows.size());
    REQUIRE(a.rows.size() == c.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(rows_equal(a.rows[i], b.rows[i]));
        CHECK(rows_equal(a.rows[i], c.rows[i]));
    }
}

TEST_CASE("bandwidth grids in reports respect the configured range") {
    StudySpec spec = small_spec();
    spec.optimal_h_rule = false;
    spec.h_count = 5;
    spec.replications = 1;
    spec.n_list = {200, 400};
    const auto report = run_study(spec);
    REQUIRE(report.h_per_n.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto iv =
            bandwidth_interval(RangeKind::H, spec.gamma, spec.n_list[i], 4.0, spec.m);
        REQUIRE(report.h_per_n[i].size() == 5);
        CHECK(report.h_per_n[i].front() == iv.lo);
        CHECK(report.h_per_n[i].back() == iv.hi);
    }
}

TEST_CASE("rate statistics enforce their bandwidth range") {
    StudySpec spec = small_spec();
    spec.optimal_h_rule = false;
    spec.h_count = 3;
    spec.replications = 2;
    const auto report = run_study(spec);  // H range
    CHECK_NOTHROW(rate_statistic(report, RateStatistic::T_UE));
    CHECK_NOTHROW(rate_statistic(report, RateStatistic::Q_inf_0));
    CHECK_THROWS_AS(rate_statistic(report, RateStatistic::Q_UE), std::invalid_argument);
    CHECK_THROWS_AS(rate_statistic(report, RateStatistic::frak_Q_UE),
                    std::invalid_argument);
    CHECK_NOTHROW(rate_statistic(report, RateStatistic::Q_UE, false));
    const auto s = rate_statistic(report, RateStatistic::T_UE);
    REQUIRE(s.n == std::vector<std::size_t>{200});
    REQUIRE(s.max_ratio.size() == 1);
    CHECK(s.max_ratio[0] >= s.median_ratio[0]);
    CHECK(s.median_ratio[0] > 0.0);
}

TEST_CASE("rate regression recovers an exact power law") {
    const std::vector<std::size_t> ns{256, 1024, 4096, 16384};
    std::vector<std::vector<double>> norms(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double nn = static_cast<double>(ns[i]);
        const double v = 3.0 * std::pow(std::log(nn) / nn, 0.4);
        norms[i] = std::vector<double>(10, v);
    }
    const auto reg = rate_regression_from_norms(ns, norms);
    CHECK(reg.slope == Catch::Approx(0.4).margin(1e-9));
    CHECK(reg.ci_lo == Catch::Approx(0.4).margin(1e-9));
    CHECK(reg.ci_hi == Catch::Approx(0.4).margin(1e-9));
    CHECK_THROWS_AS(rate_regression_from_norms({256, 1024}, {norms[0], norms[1]}),
                    std::invalid_argument);
}

TEST_CASE("confidence band half-width oracle") {
    const auto g = make_grid(200);
    SplineFit fit;
    fit.f = GridFunction(g, 0.25);
    fit.m = 2;
    fit.h = 0.05;
    const auto band = confidence_band(fit, 10000, 0.05, 2.0, 4.0);
    CHECK(band.half_width == Catch::Approx(0.1548092).margin(2e-5));
    for (std::size_t i = 0; i < band.lower.size(); i += 50) {
        CHECK(band.lower[i] == Catch::Approx(0.25 - band.half_width));
        CHECK(band.upper[i] == Catch::Approx(0.25 + band.half_width));
    }
    const auto collapsed = confidence_band(fit, 10000, 0.05, 0.0, 4.0);
    CHECK(collapsed.half_width == 0.0);
    CHECK(sup_norm(collapsed.upper - fit.f) == 0.0);
}

TEST_CASE("confidence bands refuse bandwidths with non-negligible bias") {
    const auto g = make_grid(200);
    SplineFit fit;
    fit.f = GridFunction(g, 0.0);
    fit.m = 2;
    fit.h = 0.4;
    try {
        confidence_band(fit, 10000, 0.4, 2.0, 4.0);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("F-range") != std::string::npos);
    }
}

TEST_CASE("study input validation") {
    StudySpec spec = small_spec();
    spec.n_list.clear();
    CHECK_THROWS_AS(run_study(spec), std::invalid_argument);
    spec = small_spec();
    spec.replications = 0;
    CHECK_THROWS_AS(run_study(spec), std::invalid_argument);
}

// splinekern: smoothing-spline estimation, reproducing-kernel machinery, and
// Monte Carlo rate studies on [0,1]. See README.md for usage.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "splinekern/splinekern.hpp"

namespace {

using namespace splinekern;

std::uint64_t resolve_seed(std::uint64_t configured) {
    if (const char* env = std::getenv("SPLINEKERN_SEED")) {
        const std::uint64_t s = std::strtoull(env, nullptr, 10);
        std::cout << "seed overridden by SPLINEKERN_SEED\n";
        return s;
    }
    return configured;
}

json fit_diagnostics(const SplineFit& fit, const DesignDensity& w) {
    return json{{"objective", fit.objective},
                {"residual_norm", fit.residual_norm},
                {"m", fit.m},
                {"h", fit.h},
                {"n", fit.n},
                {"sup_norm", sup_norm(fit.f)},
                {"wmh_norm", norm_wmh(fit.f, w.values(), fit.m, fit.h)},
                {"version", kToolVersion}};
}

int cmd_fit(const std::string& input, int m, double h, std::size_t grid_n,
            const std::string& density_name, const std::string& output,
            const std::string& diag_out) {
    const RegressionSample sample = sample_from_csv(read_file(input));
    const GridPtr grid = make_grid(grid_n);
    const DesignDensity w = named_density(density_name, grid);
    const SplineFit fit = fit_spline(sample.x, sample.y, grid, m, h);
    write_file(output, grid_functions_to_csv({"f"}, {&fit.f}));
    if (!diag_out.empty()) write_file(diag_out, fit_diagnostics(fit, w).dump(2) + "\n");
    std::cout << "fit written to " << output << " (objective "
              << format_double(fit.objective) << ")\n";
    return 0;
}

int cmd_kernel(int m, double h, std::size_t grid_n, const std::string& density_name,
               const std::string& output, const std::string& diag_out) {
    const GridPtr grid = make_grid(grid_n);
    const auto w = std::make_shared<const DesignDensity>(named_density(density_name, grid));
    const KernelOperator k = greens_operator(w, m, h);
    write_file(output, kernel_to_csv(k));
    if (!diag_out.empty()) {
        json diags = json::array();
        for (int ell = 0; ell <= m; ++ell) {
            const ConvolutionLikeDiagnostics d =
                convolution_like_diagnostics(ell == 0 ? k : kernel_derivative(k, ell));
            diags.push_back({{"deriv_order", d.deriv_order},
                             {"sup_l1", d.sup_l1},
                             {"h_sup", d.h_sup},
                             {"h_sup_bv", d.h_sup_bv}});
        }
        write_file(diag_out, json{{"h", h},
                                  {"m", m},
                                  {"density", density_name},
                                  {"max_asymmetry", k.max_asymmetry()},
                                  {"max_abs", k.max_abs()},
                                  {"diagnostics", diags},
                                  {"version", kToolVersion}}
                                 .dump(2) +
                                 "\n");
    }
    std::cout << "kernel written to " << output << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& output,
                 const std::string& csv_out, int threads_override) {
    std::vector<std::string> warnings;
    StudySpec spec = parse_config(read_file(config_path), &warnings);
    for (const auto& wmsg : warnings) std::cout << "warning: " << wmsg << "\n";
    spec.seed = resolve_seed(spec.seed);
    if (threads_override > 0) spec.threads = static_cast<unsigned>(threads_override);
    std::cout << "seed " << spec.seed << " config_hash " << config_hash(spec) << "\n";
    const RateReport report = run_study(spec);
    write_file(output, report_to_json(report).dump(2) + "\n");
    if (!csv_out.empty()) write_file(csv_out, report_rows_to_csv(report));
    std::cout << "report written to " << output << " (" << report.rows.size()
              << " rows, " << report.failures << " failures)\n";
    return 0;
}

int cmd_rates(const std::string& report_path, const std::string& csv_path) {
    const RateReport report = report_from_json(json::parse(read_file(report_path)));
    if (!csv_path.empty()) {
        const std::string embedded = csv_embedded_hash(read_file(csv_path));
        if (embedded != config_hash(report.spec))
            throw std::invalid_argument("rates: raw CSV hash does not match report");
    }
    std::cout << "config_hash " << config_hash(report.spec) << "\n";
    std::cout << "statistic";
    for (const std::size_t n : report.spec.n_list) std::cout << "\tn=" << n;
    std::cout << "\ttau\tp\n";
    for (const RateStatistic s :
         {RateStatistic::T_UE, RateStatistic::Q_UE, RateStatistic::frak_Q_UE,
          RateStatistic::Q_inf_0, RateStatistic::Q_inf_m, RateStatistic::Q_wm,
          RateStatistic::bias_T7}) {
        if (!report.spec.optimal_h_rule && report.spec.kind != required_range(s)) continue;
        const PerNStatistic st = rate_statistic(report, s);
        std::cout << to_string(s);
        for (const double v : st.max_ratio) std::cout << '\t' << format_double(v);
        if (st.max_ratio.size() >= 3) {
            const KendallResult kt = kendall_trend(st.max_ratio);
            std::cout << '\t' << format_double(kt.tau) << '\t'
                      << format_double(kt.p_one_sided);
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_bands(const std::string& input, int m, double h, double q, double kappa,
              double gamma, std::size_t grid_n, const std::string& output) {
    const RegressionSample sample = sample_from_csv(read_file(input));
    const GridPtr grid = make_grid(grid_n);
    const SplineFit fit = fit_spline(sample.x, sample.y, grid, m, h);
    const ConfidenceBand band = confidence_band(fit, sample.size(), h, q, kappa, gamma);
    write_file(output, grid_functions_to_csv({"lower", "fit", "upper"},
                                             {&band.lower, &fit.f, &band.upper}));
    std::cout << "bands written to " << output << " (half-width "
              << format_double(band.half_width) << ")\n";
    return 0;
}

int cmd_diagnose(const std::string& config_path, const std::string& output,
                 const std::string& test_fn) {
    std::vector<std::string> warnings;
    StudySpec spec = parse_config(read_file(config_path), &warnings);
    for (const auto& wmsg : warnings) std::cout << "warning: " << wmsg << "\n";
    spec.seed = resolve_seed(spec.seed);
    std::cout << "seed " << spec.seed << " config_hash " << config_hash(spec) << "\n";

    const GridPtr grid = make_grid(spec.grid_intervals);
    const auto density =
        std::make_shared<const DesignDensity>(named_density(spec.model.density_name, grid));
    const GridFunction f = RegressionFunction::named(test_fn).tabulate(grid);
    const GridFunction g = RegressionFunction::named("cospi").tabulate(grid);

    std::ostringstream out;
    out << "# config_hash=" << config_hash(spec) << " version=" << kToolVersion << '\n';
    out << "n,h,zeta_ratio,eta_ratio,defect,rk_sum_sup,exp_sum_sup,density_dev_sup\n";
    for (const std::size_t n : spec.n_list) {
        const auto hs = bandwidth_grid(spec.kind, spec.gamma, n, spec.range_parameter(),
                                       spec.m, spec.h_count)
                            .values;
        for (std::size_t hi = 0; hi < hs.size(); ++hi) {
            const double h = hs[hi];
            const KernelOperator k = greens_operator(density, spec.m, h);
            const ModelConfig mc{RegressionFunction::named(spec.model.f0_name), *density,
                                 NoiseSpec::constant_scale(grid, spec.model.noise_family,
                                                           spec.model.noise_sigma,
                                                           spec.model.kappa,
                                                           spec.model.noise_tail),
                                 n, derive_seed(spec.seed, n, hi + 1, 0)};
            const RegressionSample s = sample_regression(mc);
            DiagnosticsRecord rec;
            rec.n = n;
            rec.h = h;
            const auto disc = design_discrepancy(f, s.x, *density, h);
            rec.zeta_ratio = disc.normalizer > 0.0
                                 ? std::abs(disc.discrepancy) /
                                       (disc.normalizer * variance_scale(n, h))
                                 : 0.0;
            rec.eta_ratio =
                pair_discrepancy(f, g, s.x, *density, spec.m, h) / variance_scale(n, h);
            rec.defect = design_defect(f, s.x, *density, spec.m, h);
            rec.rk_sum_sup = sup_norm(rk_sum(s.x, s.noise, k));
            rec.exp_sum_sup = sup_norm(exp_sum(s.x, s.noise, h, grid));
            rec.density_dev_sup =
                sup_norm(density_estimate(s.x, h, grid) - expected_density(*density, h));
            out << rec.n << ',' << format_double(rec.h) << ','
                << format_double(rec.zeta_ratio) << ',' << format_double(rec.eta_ratio)
                << ',' << format_double(rec.defect) << ','
                << format_double(rec.rk_sum_sup) << ',' << format_double(rec.exp_sum_sup)
                << ',' << format_double(rec.density_dev_sup) << '\n';
        }
    }
    write_file(output, out.str());
    std::cout << "diagnostics written to " << output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smoothing-spline estimation and uniform-error rate studies"};
    app.require_subcommand(1);
    // drop the default -h short flag so subcommands can take --h as the bandwidth
    app.set_help_flag("--help", "print help");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a smoothing spline to a sample CSV");
    std::string fit_input, fit_output = "fit.csv", fit_diag, fit_density = "uniform";
    int fit_m = 2;
    double fit_h = 0.1;
    std::size_t fit_grid = 2000;
    fit->add_option("--input", fit_input, "sample CSV (x,y[,f0,d])")->required();
    fit->add_option("--m", fit_m, "spline order");
    fit->add_option("--h", fit_h, "bandwidth")->required();
    fit->add_option("--output", fit_output, "fit CSV (t,f)");
    fit->add_option("--diagnostics", fit_diag, "diagnostics JSON path");
    fit->add_option("--density", fit_density, "density for reported wmh norm");
    fit->add_option("--grid", fit_grid, "grid intervals N");

    // kernel
    auto* kernel = app.add_subcommand("kernel", "emit the reproducing kernel as CSV");
    std::string ker_output = "kernel.csv", ker_diag, ker_density = "uniform";
    int ker_m = 2;
    double ker_h = 0.1;
    std::size_t ker_grid = 2000;
    kernel->add_option("--m", ker_m, "spline order");
    kernel->add_option("--h", ker_h, "bandwidth")->required();
    kernel->add_option("--density", ker_density, "design density name");
    kernel->add_option("--grid", ker_grid, "grid intervals N");
    kernel->add_option("--output", ker_output, "kernel CSV path");
    kernel->add_option("--diagnostics", ker_diag, "diagnostics JSON path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo rate study");
    std::string sim_config, sim_output = "report.json", sim_csv;
    int sim_threads = 0;
    simulate->add_option("--config", sim_config, "study config JSON")->required();
    simulate->add_option("--output", sim_output, "report JSON path");
    simulate->add_option("--csv", sim_csv, "raw-row CSV path");
    simulate->add_option("--threads", sim_threads, "thread-count override");

    // rates
    auto* rates = app.add_subcommand("rates", "print rate statistics from a report");
    std::string rates_report, rates_csv;
    rates->add_option("--report", rates_report, "report JSON")->required();
    rates->add_option("--csv", rates_csv, "raw CSV to cross-check the hash");

    // bands
    auto* bands = app.add_subcommand("bands", "confidence bands around a fit");
    std::string bands_input, bands_output = "bands.csv";
    int bands_m = 2;
    double bands_h = 0.0, bands_q = 0.0, bands_kappa = 4.0, bands_gamma = 1.0;
    std::size_t bands_grid = 2000;
    bands->add_option("--input", bands_input, "sample CSV")->required();
    bands->add_option("--m", bands_m, "spline order");
    bands->add_option("--h", bands_h, "bandwidth")->required();
    bands->add_option("--q", bands_q, "calibrated quantile multiplier")->required();
    bands->add_option("--kappa", bands_kappa, "noise moment order for the F-range");
    bands->add_option("--gamma", bands_gamma, "F-range gamma");
    bands->add_option("--grid", bands_grid, "grid intervals N");
    bands->add_option("--output", bands_output, "band CSV (t, lower, fit, upper)");

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "design-sum diagnostics sweep");
    std::string diag_config, diag_output = "diagnostics.csv", diag_fn = "sin2pi";
    diagnose->add_option("--config", diag_config, "study config JSON")->required();
    diagnose->add_option("--output", diag_output, "diagnostics CSV path");
    diagnose->add_option("--function", diag_fn, "test function for the discrepancies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (fit->parsed())
            return cmd_fit(fit_input, fit_m, fit_h, fit_grid, fit_density, fit_output,
                           fit_diag);
        if (kernel->parsed())
            return cmd_kernel(ker_m, ker_h, ker_grid, ker_density, ker_output, ker_diag);
        if (simulate->parsed())
            return cmd_simulate(sim_config, sim_output, sim_csv, sim_threads);
        if (rates->parsed()) return cmd_rates(rates_report, rates_csv);
        if (bands->parsed())
            return cmd_bands(bands_input, bands_m, bands_h, bands_q, bands_kappa,
                             bands_gamma, bands_grid, bands_output);
        if (diagnose->parsed()) return cmd_diagnose(diag_config, diag_output, diag_fn);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

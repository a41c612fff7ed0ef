#ifndef SPLINEKERN_CONFIG_HPP
#define SPLINEKERN_CONFIG_HPP

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "splinekern/study.hpp"

namespace splinekern {

using nlohmann::json;

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::vector<std::string>& violations)
        : std::invalid_argument(join(violations)), violations_(violations) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid configuration:";
        for (const auto& m : v) s += "\n  - " + m;
        return s;
    }
    std::vector<std::string> violations_;
};

namespace detail {

inline void check_known_fields(const json& j, const std::set<std::string>& known,
                               const std::string& where,
                               std::vector<std::string>& errs) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            errs.push_back(where + ": unknown field \"" + it.key() + "\"");
}

}  // namespace detail

inline json to_json(const StudySpec& spec) {
    return json{
        {"model",
         {{"f0", spec.model.f0_name},
          {"density", spec.model.density_name},
          {"noise",
           {{"family", to_string(spec.model.noise_family)},
            {"sigma", spec.model.noise_sigma},
            {"kappa", spec.model.kappa},
            {"tail", spec.model.noise_tail}}}}},
        {"m", spec.m},
        {"range",
         {{"kind", to_string(spec.kind)},
          {"gamma", spec.gamma},
          {"lambda", spec.lambda},
          {"h_count", spec.h_count}}},
        {"n_list", spec.n_list},
        {"replications", spec.replications},
        {"grid", spec.grid_intervals},
        {"seed", spec.seed},
        {"optimal_h_rule", spec.optimal_h_rule}};
    // threads is execution detail, not scientific identity: results are
    // thread-count independent, so it stays out of the canonical form.
}

/// Parse and validate a study configuration. Collects every violation
/// before throwing; rejects unknown fields. Non-fatal issues go to
/// `warnings` when provided.
inline StudySpec parse_config(const std::string& text,
                              std::vector<std::string>* warnings = nullptr) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("JSON parse error: ") + e.what()});
    }
    std::vector<std::string> errs;
    StudySpec spec;

    detail::check_known_fields(j,
                               {"model", "m", "range", "n_list", "replications", "grid",
                                "seed", "threads", "optimal_h_rule"},
                               "config", errs);
    try {
        if (j.contains("model")) {
            const json& jm = j["model"];
            detail::check_known_fields(jm, {"f0", "density", "noise"}, "model", errs);
            spec.model.f0_name = jm.value("f0", spec.model.f0_name);
            spec.model.density_name = jm.value("density", spec.model.density_name);
            if (jm.contains("noise")) {
                const json& jn = jm["noise"];
                detail::check_known_fields(jn, {"family", "sigma", "kappa", "tail"},
                                           "model.noise", errs);
                if (jn.contains("family"))
                    spec.model.noise_family =
                        noise_family_from_string(jn["family"].get<std::string>());
                spec.model.noise_sigma = jn.value("sigma", spec.model.noise_sigma);
                spec.model.kappa = jn.value("kappa", spec.model.kappa);
                spec.model.noise_tail = jn.value("tail", spec.model.noise_tail);
            }
        }
        spec.m = j.value("m", spec.m);
        if (j.contains("range")) {
            const json& jr = j["range"];
            detail::check_known_fields(jr, {"kind", "gamma", "lambda", "h_count"},
                                       "range", errs);
            if (jr.contains("kind"))
                spec.kind = range_kind_from_string(jr["kind"].get<std::string>());
            spec.gamma = jr.value("gamma", spec.gamma);
            spec.lambda = jr.value("lambda", spec.lambda);
            spec.h_count = jr.value("h_count", spec.h_count);
        }
        if (j.contains("n_list")) spec.n_list = j["n_list"].get<std::vector<std::size_t>>();
        spec.replications = j.value("replications", spec.replications);
        spec.grid_intervals = j.value("grid", spec.grid_intervals);
        spec.seed = j.value("seed", spec.seed);
        spec.threads = j.value("threads", spec.threads);
        spec.optimal_h_rule = j.value("optimal_h_rule", spec.optimal_h_rule);
    } catch (const json::exception& e) {
        errs.push_back(std::string("type error: ") + e.what());
        throw ConfigError(errs);
    }

    // semantic validation; collect everything
    if (spec.m < 1 || spec.m > 4) errs.push_back("m: must satisfy 1 <= m <= 4");
    if (!(spec.model.kappa > 2.0))
        errs.push_back("model.noise.kappa: (1.7) requires kappa > 2");
    if (spec.model.noise_family != NoiseFamily::gaussian &&
        !(spec.model.noise_tail > spec.model.kappa))
        errs.push_back("model.noise.tail: must exceed the declared kappa");
    if (!(spec.model.noise_sigma >= 0.0)) errs.push_back("model.noise.sigma: must be >= 0");
    if (!(spec.gamma > 0.0)) errs.push_back("range.gamma: must be positive");
    if (spec.lambda != 0.0 &&
        !(spec.lambda > 2.0 && spec.lambda < std::min(spec.model.kappa, 4.0)))
        errs.push_back("range.lambda: must satisfy 2 < lambda < min(kappa, 4)");
    if (spec.kind == RangeKind::G && !(spec.model.kappa > 3.0) && warnings != nullptr)
        warnings->push_back("G-range results are discussed under kappa > 3 but kappa = " +
                            std::to_string(spec.model.kappa));
    if (spec.h_count < 1) errs.push_back("range.h_count: must be >= 1");
    if (spec.n_list.empty()) errs.push_back("n_list: must be nonempty");
    for (const std::size_t n : spec.n_list)
        if (n < static_cast<std::size_t>(spec.m))
            errs.push_back("n_list: every n must be >= m for uniqueness");
    if (spec.replications == 0) errs.push_back("replications: must be >= 1");
    if (spec.grid_intervals < 8 * static_cast<std::size_t>(std::max(1, spec.m)))
        errs.push_back("grid: must be at least 8m intervals");
    if (spec.threads == 0) errs.push_back("threads: must be >= 1");
    try {
        RegressionFunction::named(spec.model.f0_name);
    } catch (const std::exception& e) {
        errs.push_back(std::string("model.f0: ") + e.what());
    }
    if (spec.model.density_name != "uniform" && spec.model.density_name != "tilted" &&
        spec.model.density_name != "truncated_normal")
        errs.push_back("model.density: unknown density \"" + spec.model.density_name +
                       "\"");
    // the bandwidth interval must be nonempty for every n
    if (errs.empty() && !spec.optimal_h_rule) {
        for (const std::size_t n : spec.n_list) {
            try {
                bandwidth_interval(spec.kind, spec.gamma, n, spec.range_parameter(),
                                   spec.m);
            } catch (const std::exception& e) {
                errs.push_back("range: n=" + std::to_string(n) + ": " + e.what());
            }
        }
    }
    if (!errs.empty()) throw ConfigError(errs);
    return spec;
}

}  // namespace splinekern

#endif

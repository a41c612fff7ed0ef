#ifndef SPLINEKERN_IO_HPP
#define SPLINEKERN_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "splinekern/config.hpp"
#include "splinekern/model.hpp"
#include "splinekern/study.hpp"

namespace splinekern {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// FNV-1a over the canonical JSON dump of the study config.
inline std::string config_hash(const StudySpec& spec) {
    const std::string dump = to_json(spec).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

// ---------------------------------------------------------------------------
// sample CSV: header x,y[,f0,d]
// ---------------------------------------------------------------------------

inline std::string sample_to_csv(const RegressionSample& s) {
    std::ostringstream out;
    out << (s.has_truth() ? "x,y,f0,d\n" : "x,y\n");
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << format_double(s.x[i]) << ',' << format_double(s.y[i]);
        if (s.has_truth())
            out << ',' << format_double(s.f0[i]) << ',' << format_double(s.noise[i]);
        out << '\n';
    }
    return out.str();
}

inline RegressionSample sample_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("sample CSV: empty file");
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    const bool with_truth = line == "x,y,f0,d";
    if (!with_truth && line != "x,y")
        throw std::runtime_error("sample CSV: expected header x,y or x,y,f0,d");
    RegressionSample s;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != (with_truth ? 4u : 2u))
            throw std::runtime_error("sample CSV: bad column count at line " +
                                     std::to_string(lineno));
        s.x.push_back(vals[0]);
        s.y.push_back(vals[1]);
        if (with_truth) {
            s.f0.push_back(vals[2]);
            s.noise.push_back(vals[3]);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// grid-function CSV (t, value columns)
// ---------------------------------------------------------------------------

inline std::string grid_functions_to_csv(const std::vector<std::string>& names,
                                         const std::vector<const GridFunction*>& fns,
                                         const std::string& hash = "") {
    std::ostringstream out;
    if (!hash.empty())
        out << "# config_hash=" << hash << " version=" << kToolVersion << '\n';
    out << "t";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    const Grid& g = *fns.front()->grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        out << format_double(g.node(i));
        for (const GridFunction* f : fns) out << ',' << format_double((*f)[i]);
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// kernel CSV: row t-index, column s-index
// ---------------------------------------------------------------------------

inline std::string kernel_to_csv(const KernelOperator& k) {
    std::ostringstream out;
    for (std::size_t i = 0; i < k.size(); ++i) {
        for (std::size_t j = 0; j < k.size(); ++j) {
            if (j) out << ',';
            out << format_double(k.at(i, j));
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// rate report: JSON (spec + aggregate) and flat CSV of raw rows
// ---------------------------------------------------------------------------

inline std::string report_rows_to_csv(const RateReport& report) {
    std::ostringstream out;
    out << "# config_hash=" << config_hash(report.spec) << " version=" << kToolVersion
        << '\n';
    out << "n,h_index,h,rep,remainder_sup,remainder_wmh,kernel_sum_sup,kernel_sum_wmh,"
           "err_sup,err_wmh,bias_sup,cbias_sup,deriv_sum_sup\n";
    for (const RateRow& r : report.rows) {
        out << r.n << ',' << r.h_index << ',' << format_double(r.h) << ',' << r.rep << ','
            << format_double(r.remainder_sup) << ',' << format_double(r.remainder_wmh)
            << ',' << format_double(r.kernel_sum_sup) << ','
            << format_double(r.kernel_sum_wmh) << ',' << format_double(r.err_sup) << ','
            << format_double(r.err_wmh) << ',' << format_double(r.bias_sup) << ','
            << format_double(r.cbias_sup) << ',' << format_double(r.deriv_sum_sup)
            << '\n';
    }
    return out.str();
}

inline json report_to_json(const RateReport& report) {
    json rows = json::array();
    for (const RateRow& r : report.rows)
        rows.push_back({r.n, r.h_index, r.h, r.rep, r.remainder_sup, r.remainder_wmh,
                        r.kernel_sum_sup, r.kernel_sum_wmh, r.err_sup, r.err_wmh,
                        r.bias_sup, r.cbias_sup, r.deriv_sum_sup});
    return json{{"version", kToolVersion},
                {"config_hash", config_hash(report.spec)},
                {"spec", to_json(report.spec)},
                {"h_per_n", report.h_per_n},
                {"failures", report.failures},
                {"rows", rows}};
}

inline RateReport report_from_json(const json& j) {
    RateReport report;
    report.spec = parse_config(j.at("spec").dump());
    if (j.at("config_hash").get<std::string>() != config_hash(report.spec))
        throw std::runtime_error("report: config hash mismatch");
    report.h_per_n = j.at("h_per_n").get<std::vector<std::vector<double>>>();
    report.failures = j.at("failures").get<std::size_t>();
    for (const json& row : j.at("rows")) {
        RateRow r;
        r.n = row.at(0).get<std::size_t>();
        r.h_index = row.at(1).get<std::size_t>();
        r.h = row.at(2).get<double>();
        r.rep = row.at(3).get<std::size_t>();
        r.remainder_sup = row.at(4).get<double>();
        r.remainder_wmh = row.at(5).get<double>();
        r.kernel_sum_sup = row.at(6).get<double>();
        r.kernel_sum_wmh = row.at(7).get<double>();
        r.err_sup = row.at(8).get<double>();
        r.err_wmh = row.at(9).get<double>();
        r.bias_sup = row.at(10).get<double>();
        r.cbias_sup = row.at(11).get<double>();
        r.deriv_sum_sup = row.at(12).get<double>();
        report.rows.push_back(r);
    }
    return report;
}

/// Extract the config hash comment from a raw-row CSV.
inline std::string csv_embedded_hash(const std::string& csv) {
    const std::string key = "# config_hash=";
    if (csv.rfind(key, 0) != 0) return "";
    const std::size_t start = key.size();
    const std::size_t end = csv.find(' ', start);
    return csv.substr(start, end - start);
}

}  // namespace splinekern

#endif

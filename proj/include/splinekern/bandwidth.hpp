#ifndef SPLINEKERN_BANDWIDTH_HPP
#define SPLINEKERN_BANDWIDTH_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace splinekern {

enum class RangeKind { H, G, F, D };

inline std::string to_string(RangeKind k) {
    switch (k) {
        case RangeKind::H: return "H";
        case RangeKind::G: return "G";
        case RangeKind::F: return "F";
        case RangeKind::D: return "D";
    }
    return "?";
}

inline RangeKind range_kind_from_string(const std::string& s) {
    if (s == "H") return RangeKind::H;
    if (s == "G") return RangeKind::G;
    if (s == "F") return RangeKind::F;
    if (s == "D") return RangeKind::D;
    throw std::invalid_argument("unknown bandwidth range kind: " + s);
}

/// Midpoint of the admissible interval 2 < λ < min(κ, 4).
inline double default_lambda(double kappa) { return 0.5 * (2.0 + std::min(kappa, 4.0)); }

struct BandwidthInterval {
    double lo = 0.0;
    double hi = 0.0;
};

inline BandwidthInterval bandwidth_interval(RangeKind kind, double gamma, std::size_t n,
                                            double kappa_or_lambda, int m) {
    if (!(gamma > 0.0)) throw std::invalid_argument("bandwidth_interval: gamma > 0 required");
    if (n < 2) throw std::invalid_argument("bandwidth_interval: n too small");
    const double nn = static_cast<double>(n);
    const double log_over_n = std::log(nn) / nn;
    BandwidthInterval iv;
    switch (kind) {
        case RangeKind::H:
        case RangeKind::G: {
            const double expo = kind == RangeKind::H ? kappa_or_lambda : kappa_or_lambda;
            if (!(expo > 2.0))
                throw std::invalid_argument("bandwidth_interval: exponent parameter must exceed 2");
            if (kind == RangeKind::G && !(expo < 4.0))
                throw std::invalid_argument("bandwidth_interval: lambda must be below 4");
            iv.lo = gamma * std::pow(log_over_n, 1.0 - 2.0 / expo);
            iv.hi = 0.5;
            break;
        }
        case RangeKind::F: {
            if (!(kappa_or_lambda > 2.0))
                throw std::invalid_argument("bandwidth_interval: kappa must exceed 2");
            if (m < 1) throw std::invalid_argument("bandwidth_interval: F-range needs m");
            iv.lo = gamma * std::pow(log_over_n, 1.0 - 2.0 / kappa_or_lambda);
            iv.hi = std::pow(nn, -1.0 / (2.0 * m + 1.0));
            break;
        }
        case RangeKind::D:
            iv.lo = gamma * log_over_n;
            iv.hi = 0.5;
            break;
    }
    if (!(iv.lo < iv.hi))
        throw std::invalid_argument(
            "bandwidth_interval: empty interval, lower bound " + std::to_string(iv.lo) +
            " >= upper bound " + std::to_string(iv.hi));
    return iv;
}

struct BandwidthGrid {
    RangeKind kind = RangeKind::H;
    double gamma = 1.0;
    double kappa_or_lambda = 0.0;
    std::size_t n = 0;
    int m = 0;
    std::vector<double> values;  // strictly increasing, endpoints included
};

inline BandwidthGrid bandwidth_grid(RangeKind kind, double gamma, std::size_t n,
                                    double kappa_or_lambda, int m, std::size_t count) {
    if (count < 2) throw std::invalid_argument("bandwidth_grid: need at least 2 values");
    const BandwidthInterval iv = bandwidth_interval(kind, gamma, n, kappa_or_lambda, m);
    BandwidthGrid g{kind, gamma, kappa_or_lambda, n, m, {}};
    g.values.resize(count);
    const double la = std::log(iv.lo), lb = std::log(iv.hi);
    for (std::size_t i = 0; i < count; ++i)
        g.values[i] =
            std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(count - 1));
    g.values.front() = iv.lo;
    g.values.back() = iv.hi;
    return g;
}

}  // namespace splinekern

#endif

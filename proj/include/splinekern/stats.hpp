#ifndef SPLINEKERN_STATS_HPP
#define SPLINEKERN_STATS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace splinekern {

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty input");
    const std::size_t k = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + k, v.end());
    double hi = v[k];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + k - 1, v.begin() + k);
        return 0.5 * (v[k - 1] + hi);
    }
    return hi;
}

/// q in [0,1]; linear interpolation between order statistics.
inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("percentile: empty input");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return (1.0 - frac) * v[lo] + frac * v[hi];
}

struct KendallResult {
    double tau = 0.0;
    double p_one_sided = 1.0;  // P(tau >= observed) under exchangeability
};

namespace detail {

inline void count_concordant(const std::vector<double>& y, long& conc, long& disc) {
    conc = disc = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            if (y[j] > y[i]) ++conc;
            else if (y[j] < y[i]) ++disc;
        }
}

}  // namespace detail

/// Kendall trend test of y against its index. One-sided p-value for an
/// increasing trend: exact permutation for n <= 8, normal approximation
/// otherwise.
inline KendallResult kendall_trend(const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n < 3) throw std::invalid_argument("kendall_trend: need at least 3 points");
    long conc = 0, disc = 0;
    detail::count_concordant(y, conc, disc);
    const long s_obs = conc - disc;
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    KendallResult r;
    r.tau = static_cast<double>(s_obs) / pairs;
    if (n <= 8) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        long total = 0, at_least = 0;
        std::vector<double> yp(n);
        do {
            for (std::size_t i = 0; i < n; ++i) yp[i] = y[perm[i]];
            long c = 0, d = 0;
            detail::count_concordant(yp, c, d);
            ++total;
            if (c - d >= s_obs) ++at_least;
        } while (std::next_permutation(perm.begin(), perm.end()));
        r.p_one_sided = static_cast<double>(at_least) / static_cast<double>(total);
    } else {
        const double var = static_cast<double>(n) * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
        const double z = (static_cast<double>(s_obs) - 1.0) / std::sqrt(var);
        r.p_one_sided = 0.5 * std::erfc(z / std::sqrt(2.0));
    }
    return r;
}

struct OlsLine {
    double slope = 0.0;
    double intercept = 0.0;
};

inline OlsLine ols(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("ols: need matching inputs of length >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("ols: degenerate abscissae");
    OlsLine l;
    l.slope = (n * sxy - sx * sy) / denom;
    l.intercept = (sy - l.slope * sx) / n;
    return l;
}

/// One-sample Kolmogorov-Smirnov statistic against a cdf given as a callable.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double c = cdf(sample[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(c - static_cast<double>(i + 1) / n));
    }
    return d;
}

}  // namespace splinekern

#endif

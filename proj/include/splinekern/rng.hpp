#ifndef SPLINEKERN_RNG_HPP
#define SPLINEKERN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace splinekern {

/// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic substream seed from (master seed, tags...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = master;
    std::uint64_t z = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    z ^= splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    z ^= splitmix64(s);
    s ^= c * 0x165667b19e3779f9ULL;
    z ^= splitmix64(s);
    return z;
}

/// Seeded generator with distributions implemented in-library so that
/// streams are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // (0,1)
        const std::uint64_t x = engine_();
        double u = static_cast<double>(x >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double gaussian() {  // Box-Muller, one value per call
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Gamma(shape, 1), Marsaglia-Tsang; shape > 0.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = gaussian();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Student-t with nu d.o.f., unit scale (variance nu/(nu-2) for nu>2).
    double student_t(double nu) {
        const double z = gaussian();
        const double chi2 = 2.0 * gamma(0.5 * nu);
        return z / std::sqrt(chi2 / nu);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace splinekern

#endif

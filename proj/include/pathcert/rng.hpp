#pragma once

// Deterministic counter-keyed random streams. Every sampling site derives an
// independent stream from (seed, stream index), so results do not depend on
// the order in which settings are processed and are byte-stable across runs
// and platforms (no std::*_distribution, whose outputs vary by libstdc++).

#include <cmath>
#include <cstdint>

namespace pathcert {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1], safe as a log() argument.
    double next_open_double() { return 1.0 - next_double(); }

private:
    std::uint64_t state_;
};

// Independent stream for a given (seed, index[, subindex]) key.
inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index, std::uint64_t subindex = 0) {
    SplitMix64 mixer(seed ^ (0xd6e8feb86659fd93ULL * (index + 1)) ^ (0xa5a5a5a5a5a5a5a5ULL * (subindex + 1)));
    SplitMix64 out(mixer.next());
    return out;
}

// Standard normal via Box-Muller.
inline double sample_normal(SplitMix64& rng) {
    const double u1 = rng.next_open_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

namespace detail {

// Knuth multiplication method; exact, valid while exp(-lambda) is normal.
inline std::uint64_t poisson_knuth(SplitMix64& rng, double lambda) {
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.next_open_double();
    } while (p > limit);
    return k - 1;
}

}

// Poisson sample. Exact (chunked Knuth, additivity of Poisson) up to 1e5;
// normal approximation above, where relative skew is below 4e-3 and the
// counts in question are ~1e13 exact-mode scale factors.
inline std::uint64_t sample_poisson(SplitMix64& rng, double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda > 1e5) {
        const double x = lambda + std::sqrt(lambda) * sample_normal(rng);
        return x <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(x));
    }
    std::uint64_t total = 0;
    while (lambda > 500.0) {
        total += detail::poisson_knuth(rng, 500.0);
        lambda -= 500.0;
    }
    return total + detail::poisson_knuth(rng, lambda);
}

}

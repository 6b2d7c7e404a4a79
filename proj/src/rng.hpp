#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace askl {

// Counter-based SplitMix64 generator. Every distribution below is written
// out explicitly so that streams are bit-identical on any platform with
// IEEE-754 doubles; std::* distributions are implementation-defined and
// would break run-to-run reproducibility across standard libraries.
class rng {
public:
    explicit rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [0, high).
    double next_uniform(double high) { return next_unit() * high; }

    // Uniform integer in [0, bound) by rejection, unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw argument_error("next_below: bound must be positive");
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Standard normal via the Marsaglia polar method. Pairs are cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed from a master seed and a stream tag,
// so that e.g. frequency sampling and epoch shuffles never share a stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    rng g(master ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull));
    return g.next_u64();
}

// Fisher-Yates shuffle, deterministic given the generator state.
template <typename T>
void shuffle(std::vector<T>& items, rng& g) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(g.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace askl

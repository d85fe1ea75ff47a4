#pragma once

#include "lru/base.hpp"

namespace lru {

// Counter-based deterministic generator (splitmix64 applied to
// seed + counter * golden_gamma). Stateless addressing makes streams
// reproducible across platforms and languages; see docs/formats.md.
inline u64 rng_at(u64 seed, u64 counter) {
    u64 z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Sequential view over the counter-based stream.
class Rng {
public:
    explicit Rng(u64 seed, u64 counter = 0) : seed_(seed), counter_(counter) {}

    u64 next() { return rng_at(seed_, counter_++); }

    // Uniform-enough value in [0, bound); bound must be nonzero. The modulo
    // bias is irrelevant at the word-vs-desk scale used here.
    u64 below(u64 bound) { return next() % bound; }

    u64 counter() const { return counter_; }

private:
    u64 seed_;
    u64 counter_;
};

} // namespace lru

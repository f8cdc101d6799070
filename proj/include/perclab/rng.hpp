#pragma once

#include <cstdint>

namespace perclab {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based draw keyed by (seed, sample, element): stateless, so sample
// ranges can be split across workers with identical results.
inline uint64_t counter_draw(uint64_t seed, uint64_t sample, uint64_t element) {
    return splitmix64(splitmix64(seed ^ (sample * 0xD1342543DE82EF95ull)) ^
                      (element * 0xAF251AF3B0F025B5ull));
}

inline double to_unit_interval(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small sequential stream for test data generation.
class SplitMix {
public:
    explicit SplitMix(uint64_t seed) : state_(seed) {}
    uint64_t next() { return splitmix64(state_++); }
    uint64_t next_below(uint64_t n) { return next() % n; }
    double next_unit() { return to_unit_interval(next()); }

private:
    uint64_t state_;
};

}  // namespace perclab

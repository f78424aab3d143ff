#ifndef KCOLL_RANDOM_HPP
#define KCOLL_RANDOM_HPP

#include <cstdint>
#include <random>

namespace kcoll {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seeded mt19937_64 with an implementation-independent uniform draw, so
/// runs are reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Independent child stream keyed by `stream`.
    Rng split(std::uint64_t stream) const { return Rng(splitmix64(seed_ ^ splitmix64(stream))); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace kcoll

#endif // KCOLL_RANDOM_HPP

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace psa {

/// Deterministic, portable PRNG used project-wide: xoshiro256++ seeded via
/// splitmix64. One fixed algorithm so the same seed yields the same stream on
/// every platform; std:: engines are never used.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Next raw 64-bit draw.
    std::uint64_t next();

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal via the Marsaglia polar method.
    double normal();

    /// Exponential with the given rate (> 0).
    double exponential(double rate);

    /// Unbiased integer in [0, bound); bound must be positive.
    std::uint64_t uniform_int(std::uint64_t bound);

    /// Index drawn from an unnormalized weight vector.
    int categorical(const std::vector<double>& weights);

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derived independent stream. Depends only on (construction seed, id),
    /// not on how many draws were made from this generator.
    SeededRng fork(std::uint64_t id) const;

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace psa

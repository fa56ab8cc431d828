#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>

namespace freqgen {

// 64-bit Mersenne Twister (std::mt19937_64, fully specified by the C++
// standard) so a seed reproduces the same stream on every platform.
class RandomSource {
public:
    static constexpr const char* algorithm = "mt19937_64";

    explicit RandomSource(uint64_t seed = 0) : seed_(seed), eng_(seed) {}

    uint64_t seed() const { return seed_; }
    uint64_t draws() const { return draws_; }
    uint64_t next() {
        ++draws_;
        return eng_();
    }

    // Uniform integer in [0, bound); bound > 0.
    uint64_t below(uint64_t bound);
    // Uniform integer in [0, bound); bound > 0.
    mpz_class below(const mpz_class& bound);
    // Uniform double in [0, 1) from 53 random bits.
    double uniform01();

    // Seed of the stream owned by worker w of a run seeded with seed.
    static uint64_t derive(uint64_t seed, uint64_t w);

private:
    uint64_t seed_;
    std::mt19937_64 eng_;
    uint64_t draws_ = 0;
};

}  // namespace freqgen

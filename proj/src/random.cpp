#include "freqgen/random.hpp"

#include <vector>

namespace freqgen {

uint64_t RandomSource::below(uint64_t bound) {
    if (bound <= 1) return 0;
    uint64_t mask = ~0ULL;
    uint64_t top = bound - 1;
    int lz = __builtin_clzll(top);
    mask >>= lz;
    while (true) {
        uint64_t x = next() & mask;
        if (x < bound) return x;
    }
}

mpz_class RandomSource::below(const mpz_class& bound) {
    if (bound <= 1) return 0;
    mpz_class top = bound - 1;
    size_t bits = mpz_sizeinbase(top.get_mpz_t(), 2);
    size_t words = (bits + 63) / 64;
    unsigned extra = static_cast<unsigned>(words * 64 - bits);
    std::vector<uint64_t> buf(words);
    mpz_class x;
    while (true) {
        // Most significant word first, masked to the bit length of bound - 1.
        for (size_t i = 0; i < words; ++i) buf[words - 1 - i] = next();
        buf[words - 1] &= (~0ULL) >> extra;
        mpz_import(x.get_mpz_t(), words, -1, sizeof(uint64_t), 0, 0, buf.data());
        if (x < bound) return x;
    }
}

double RandomSource::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

uint64_t RandomSource::derive(uint64_t seed, uint64_t w) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (w + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace freqgen

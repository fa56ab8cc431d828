#pragma once

#include "freqgen/random.hpp"
#include "freqgen/sampler.hpp"

#include <gmpxx.h>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace freqgen {

// Occurrences j_1..j_k of the distinguished atoms plus r other atoms.
struct OccurrenceVector {
    std::vector<int> j;
    int r = 0;

    int size() const;
};

struct ExactOptions {
    bool fast_path = true;                 // single-term rule for atom-led products
    std::optional<uint64_t> memory_budget;  // bytes; defaults to FREQGEN_TABLE_MEMORY when set
    int max_total = -1;                     // skip cells whose total size exceeds this
};

// Counts c_j per class for every j below the target, together with the
// partial sums c^(h_1..h_i)_j of each product class (1 <= i <= k).
struct ExactTable {
    std::shared_ptr<const StandardSpec> spec;
    std::vector<int> atoms;  // distinguished atoms, in the order h is chosen
    OccurrenceVector target;
    std::vector<int> extent;      // j_1+1, ..., j_k+1, r+1
    std::vector<size_t> stride;   // linear index = sum stride[d] * component[d]
    size_t cells = 0;
    std::vector<int> dim_of_atom;  // atom -> dimension, k for undistinguished atoms
    std::vector<std::vector<mpz_class>> c;  // [class][cell]
    std::vector<char> fast;                 // product class evaluated by the single-term rule
    std::vector<char> has_partial;          // [class]
    // partial[class][i-1] holds c^(h_1..h_i)_j at offset[i-1][cell] + rank(h_1..h_i).
    std::vector<std::vector<std::vector<mpz_class>>> partial;
    std::vector<std::vector<size_t>> offset;
    uint64_t multiplications = 0;

    int k() const { return static_cast<int>(atoms.size()); }
    size_t index(const OccurrenceVector& v) const;
    OccurrenceVector vector_at(size_t cell) const;
    int total(size_t cell) const;
    size_t partial_rank(size_t cell, const std::vector<int>& h, int depth) const;
    const mpz_class& count(int cls, const OccurrenceVector& v) const { return c[cls][index(v)]; }
};

// Predicted storage in bytes, reported before building.
uint64_t predicted_table_bytes(const StandardSpec& s, const std::vector<int>& atoms, const OccurrenceVector& target,
                               const ExactOptions& opt = {});

ExactTable build_exact_table(std::shared_ptr<const StandardSpec> spec, const std::vector<int>& atoms,
                             const OccurrenceVector& target, const ExactOptions& opt = {});

// Number of structures of the axiom with exactly the target occurrences.
mpz_class fiber_count(const ExactTable& t);

// Uniform structure of the fiber.  Throws EmptyFiber.
DerivationTree exact_sample(const ExactTable& t, RandomSource& rng, const SampleOptions& opt = {},
                            SampleStats* stats = nullptr);

// Parses "a=2,b=3" (with atom names) into a target for the given size.
OccurrenceVector parse_occurrences(const StandardSpec& s, const std::string& text, int n,
                                   std::vector<int>& atoms);

}  // namespace freqgen

#pragma once

#include "freqgen/count.hpp"
#include "freqgen/random.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace freqgen {

struct TreeNode {
    int cls = -1;
    int size = 0;
    int start = 0;  // offset of the node's first atom in the word
    int left = -1;
    int right = -1;
    int choice = -1;  // union side, product split size, or atom id
    int mark = -1;    // marked word offset for a pointed node
};

struct DerivationTree {
    std::shared_ptr<const StandardSpec> spec;
    int root_class = -1;
    int size = 0;
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<int> word;
    bool has_trace = false;
    mpq_class trace_probability = 1;

    std::vector<int> atom_counts() const;
};

struct SampleOptions {
    bool trace = true;  // accumulate the exact branch-probability product
};

struct SampleStats {
    uint64_t comparisons = 0;  // split candidates examined in product loops
    uint64_t samples = 0;
};

DerivationTree sample_one(const CountTable& t, int cls, int n, RandomSource& rng,
                          const SampleOptions& opt = {}, SampleStats* stats = nullptr);

std::vector<DerivationTree> sample_many(const CountTable& t, int cls, int n, int m, RandomSource& rng,
                                        const SampleOptions& opt = {}, SampleStats* stats = nullptr);

// m samples split over `workers` streams seeded with RandomSource::derive(seed, w);
// sample i comes from worker i % workers.  Output depends only on (seed, workers).
std::vector<DerivationTree> sample_sharded(const CountTable& t, int cls, int n, int m, uint64_t seed,
                                           int workers, const SampleOptions& opt = {},
                                           SampleStats* stats = nullptr);

// Visits every derivation the sampler can emit together with its exact
// emission probability.  Intended for small sizes.
void enumerate_derivations(const CountTable& t, int cls, int n,
                           const std::function<void(const DerivationTree&)>& visit);

std::string render_word(const DerivationTree& d, const std::string& sep = "");
// Parenthesized derivation over the classes of the source grammar.
std::string render_tree(const DerivationTree& d);
// Unique key of the derivation (all recorded choices, pre-order).
std::string derivation_key(const DerivationTree& d);

// Order in which split sizes 0..n are examined: 0, n, 1, n-1, ...
inline int boustrophedon(int i, int n) { return (i % 2 == 0) ? i / 2 : n - i / 2; }

}  // namespace freqgen

#pragma once

#include "freqgen/count.hpp"

#include <map>
#include <memory>
#include <vector>

namespace freqgen {

// Weighted sums g(Z, C, n, m) over structures of C of size n holding exactly
// m copies of atom Z.  Stored like CountTable: g = num / (D^n * E_n).
struct OccurrenceTable {
    std::shared_ptr<const StandardSpec> spec;
    int atom = -1;
    int n_max = 0;
    mpz_class D = 1;
    std::vector<mpz_class> E;
    std::vector<std::vector<std::vector<mpz_class>>> num;  // [class][n][m]

    mpq_class value(int c, int n, int m) const;
    // Expected number of occurrences of the atom in class c at size n.
    mpq_class expected(int c, int n) const;
    mpq_class total(int c, int n) const;
};

OccurrenceTable build_occurrence_table(std::shared_ptr<const StandardSpec> spec, const Weights& w, int atom,
                                       int n_max);

// Expected occurrences of `atom` in a size-n structure of the axiom, by the
// occurrence-count recurrences.
mpq_class freq_dp(std::shared_ptr<const StandardSpec> spec, const Weights& w, int atom, int n);

// Base classes followed by pointed companions: pointed[i][c] is the class
// counting structures of c with one marked occurrence of atoms[i], or -1 when
// no such structure exists.
struct PointedSpec {
    std::shared_ptr<const StandardSpec> spec;
    std::vector<int> atoms;
    std::vector<std::vector<int>> pointed;

    int companion(int atom, int cls) const;
};

PointedSpec point_spec(const StandardSpec& s, int atom);
PointedSpec point_spec(const StandardSpec& s, const std::vector<int>& atoms);

mpq_class freq_via_pointing(std::shared_ptr<const StandardSpec> spec, const Weights& w, int atom, int n);

enum class FreqMethod { Auto, Pointing, DP };

// Expected frequency f(Z, axiom, n) / n for each listed atom (all atoms when empty).
std::map<int, mpq_class> frequency_profile(std::shared_ptr<const StandardSpec> spec, const Weights& w, int n,
                                           std::vector<int> atoms = {}, FreqMethod method = FreqMethod::Auto);

// Floating-point profile evaluator reused across many weight vectors.  Uses
// the pointed grammar for context-free specifications and the occurrence
// recurrences otherwise.  Counts are rescaled geometrically on the fly so
// extreme weights neither overflow nor underflow.
class ProfileEvaluator {
public:
    ProfileEvaluator(std::shared_ptr<const StandardSpec> spec, std::vector<int> atoms, int n,
                     Kernel kernel = Kernel::Serial);

    // weights[a] for every atom of the specification.
    std::vector<double> evaluate(const std::vector<double>& weights) const;
    const std::vector<int>& atoms() const { return atoms_; }
    int size() const { return n_; }

private:
    std::vector<double> eval_pointed(const std::vector<double>& weights) const;
    std::vector<double> eval_dp(const std::vector<double>& weights) const;

    std::shared_ptr<const StandardSpec> spec_;
    std::vector<int> atoms_;
    int n_;
    Kernel kernel_;
    bool pointed_route_;
    PointedSpec ps_;
};

}  // namespace freqgen

#pragma once

#include "freqgen/kernels.hpp"
#include "freqgen/spec.hpp"

#include <gmpxx.h>

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace freqgen {

// Positive rational weight per atom; absent atoms weigh 1.
struct Weights {
    std::map<int, mpq_class> entries;

    mpq_class get(int atom) const;
    void set(int atom, const mpq_class& w);
    bool uniform() const;
    // Weights declared in the grammar file.
    static Weights from_spec(const Specification& s);
    std::string to_string(const std::vector<AtomInfo>& atoms) const;
};

// Weighted counts c_n per class, stored as integers: c_n = num / (D^n * E_n),
// where D is the lcm of the weight denominators and E_n stays 1 unless an
// unpointing rule needs a non-integral division at size n.
struct CountTable {
    std::shared_ptr<const StandardSpec> spec;
    Weights weights;
    std::string fingerprint;
    int n_max = 0;
    bool uniform = true;
    mpz_class D = 1;
    std::vector<mpz_class> E;
    std::vector<std::vector<mpz_class>> num;
    std::vector<mpz_class> atom_scaled;  // pi_a * D

    const mpz_class& scaled(int c, int n) const { return num[c][n]; }
    mpz_class denominator(int n) const;
    mpq_class value(int c, int n) const;
    // E_n / (E_k E_{n-k}); multiplies product terms so they share the scale of size n.
    mpz_class split_factor(int n, int k) const;
    bool integral_scale() const { return !spec->has_unpoint; }
};

struct CountOptions {
    Kernel kernel = Kernel::Serial;
};

std::string table_fingerprint(const StandardSpec& s, const Weights& w);

CountTable build_count_table(std::shared_ptr<const StandardSpec> spec, const Weights& w, int n_max,
                             const CountOptions& opt = {});

mpq_class count(const CountTable& t, int cls, int n);
mpq_class count(const CountTable& t, const std::string& cls, int n);

// Binary cache: magic "FQGT", u32 version, u64 length + fingerprint bytes,
// u32 n_max, u32 class count, then for each class and each size 0..n_max the
// value c_n as numerator then denominator.  Each integer is a u8 sign byte
// (0 zero, 1 positive, 2 negative), a u64 byte count and the magnitude bytes,
// least significant first.  All fixed-width fields are little-endian.
void save_table(const CountTable& t, std::ostream& out);
CountTable load_table(std::istream& in, std::shared_ptr<const StandardSpec> spec, const Weights& w);

}  // namespace freqgen

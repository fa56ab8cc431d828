#pragma once

#include <gmpxx.h>

#include <vector>

namespace freqgen {

enum class Kernel { Serial, OpenMP };

// out = sum_{k=0..n} a[k] * b[n-k] (* fac[k] when fac is non-null).
// Zero operands are skipped.  Both kernels give identical results.
void convolve_at(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int n,
                 const std::vector<mpz_class>* fac, mpz_class& out, Kernel kernel);

void convolve_at_serial(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int n,
                        const std::vector<mpz_class>* fac, mpz_class& out);
void convolve_at_omp(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int n,
                     const std::vector<mpz_class>* fac, mpz_class& out);

// Floating variant used by the fitter.  The OpenMP kernel combines per-thread
// partial sums in thread order, so results depend only on the thread count.
long double convolve_at(const std::vector<long double>& a, const std::vector<long double>& b, int n,
                        Kernel kernel);
long double convolve_at_serial(const std::vector<long double>& a, const std::vector<long double>& b, int n);
long double convolve_at_omp(const std::vector<long double>& a, const std::vector<long double>& b, int n);

int max_threads();

}  // namespace freqgen

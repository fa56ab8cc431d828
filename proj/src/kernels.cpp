#include "freqgen/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace freqgen {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void convolve_at_serial(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int n,
                        const std::vector<mpz_class>* fac, mpz_class& out) {
    out = 0;
    mpz_class t;
    for (int k = 0; k <= n; ++k) {
        const mpz_class& x = a[k];
        const mpz_class& y = b[n - k];
        if (sgn(x) == 0 || sgn(y) == 0) continue;
        if (fac) {
            mpz_mul(t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
            mpz_addmul(out.get_mpz_t(), t.get_mpz_t(), (*fac)[k].get_mpz_t());
        } else {
            mpz_addmul(out.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        }
    }
}

void convolve_at_omp(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int n,
                     const std::vector<mpz_class>* fac, mpz_class& out) {
#ifdef _OPENMP
    int nt = omp_get_max_threads();
    if (nt <= 1 || n < 64) {
        convolve_at_serial(a, b, n, fac, out);
        return;
    }
    std::vector<mpz_class> part(nt);
#pragma omp parallel num_threads(nt)
    {
        int id = omp_get_thread_num();
        mpz_class acc, t;
#pragma omp for schedule(static)
        for (int k = 0; k <= n; ++k) {
            const mpz_class& x = a[k];
            const mpz_class& y = b[n - k];
            if (sgn(x) == 0 || sgn(y) == 0) continue;
            if (fac) {
                mpz_mul(t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
                mpz_addmul(acc.get_mpz_t(), t.get_mpz_t(), (*fac)[k].get_mpz_t());
            } else {
                mpz_addmul(acc.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
            }
        }
        part[id] = acc;
    }
    out = 0;
    for (const auto& p : part) out += p;
#else
    convolve_at_serial(a, b, n, fac, out);
#endif
}

void convolve_at(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int n,
                 const std::vector<mpz_class>* fac, mpz_class& out, Kernel kernel) {
    if (kernel == Kernel::OpenMP)
        convolve_at_omp(a, b, n, fac, out);
    else
        convolve_at_serial(a, b, n, fac, out);
}

long double convolve_at_serial(const std::vector<long double>& a, const std::vector<long double>& b, int n) {
    long double s = 0;
    for (int k = 0; k <= n; ++k) s += a[k] * b[n - k];
    return s;
}

long double convolve_at_omp(const std::vector<long double>& a, const std::vector<long double>& b, int n) {
#ifdef _OPENMP
    int nt = omp_get_max_threads();
    if (nt <= 1 || n < 256) return convolve_at_serial(a, b, n);
    std::vector<long double> part(nt, 0.0L);
#pragma omp parallel num_threads(nt)
    {
        int id = omp_get_thread_num();
        long double acc = 0;
#pragma omp for schedule(static)
        for (int k = 0; k <= n; ++k) acc += a[k] * b[n - k];
        part[id] = acc;
    }
    long double s = 0;
    for (long double p : part) s += p;
    return s;
#else
    return convolve_at_serial(a, b, n);
#endif
}

long double convolve_at(const std::vector<long double>& a, const std::vector<long double>& b, int n,
                        Kernel kernel) {
    return kernel == Kernel::OpenMP ? convolve_at_omp(a, b, n) : convolve_at_serial(a, b, n);
}

}  // namespace freqgen

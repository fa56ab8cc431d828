#include "freqgen/freqgen.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <string>

using namespace freqgen;

namespace {

std::shared_ptr<const StandardSpec> fixture(const std::string& name) {
    return standardize(load_spec(std::string(FREQGEN_FIXTURES) + "/" + name + ".grammar")).spec;
}

std::vector<mpz_class> motzkin_row(int n) {
    auto t = build_count_table(fixture("motzkin"), {}, n);
    return t.num[t.spec->axiom];
}

void BM_Convolve(benchmark::State& st, Kernel k) {
    const int n = static_cast<int>(st.range(0));
    static std::map<int, std::vector<mpz_class>> rows;
    auto& row = rows[n];
    if (row.empty()) row = motzkin_row(n);
    mpz_class out;
    for (auto _ : st) {
        convolve_at(row, row, n, nullptr, out, k);
        benchmark::DoNotOptimize(out);
    }
}

void BM_ConvolveFloat(benchmark::State& st, Kernel k) {
    const int n = static_cast<int>(st.range(0));
    std::vector<long double> a(n + 1), b(n + 1);
    for (int i = 0; i <= n; ++i) {
        a[i] = 1.0L / (i + 1);
        b[i] = 0.5L + i;
    }
    for (auto _ : st) benchmark::DoNotOptimize(convolve_at(a, b, n, k));
}

void BM_CountTable(benchmark::State& st, const std::string& name, Kernel k) {
    auto spec = fixture(name);
    const int n = static_cast<int>(st.range(0));
    CountOptions opt;
    opt.kernel = k;
    for (auto _ : st) benchmark::DoNotOptimize(build_count_table(spec, {}, n, opt));
}

void BM_Profile(benchmark::State& st, Kernel k) {
    auto spec = fixture("rna");
    std::vector<int> atoms;
    for (int a = 0; a < static_cast<int>(spec->atoms.size()); ++a) atoms.push_back(a);
    ProfileEvaluator ev(spec, atoms, static_cast<int>(st.range(0)), k);
    std::vector<double> w(atoms.size(), 1.1);
    for (auto _ : st) benchmark::DoNotOptimize(ev.evaluate(w));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Convolve, serial, Kernel::Serial)->Arg(1000)->Arg(4000);
BENCHMARK_CAPTURE(BM_Convolve, openmp, Kernel::OpenMP)->Arg(1000)->Arg(4000);
BENCHMARK_CAPTURE(BM_ConvolveFloat, serial, Kernel::Serial)->Arg(1000)->Arg(100000);
BENCHMARK_CAPTURE(BM_ConvolveFloat, openmp, Kernel::OpenMP)->Arg(1000)->Arg(100000);
BENCHMARK_CAPTURE(BM_CountTable, motzkin_serial, "motzkin", Kernel::Serial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CountTable, motzkin_openmp, "motzkin", Kernel::OpenMP)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CountTable, rna_serial, "rna", Kernel::Serial)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_CountTable, rna_openmp, "rna", Kernel::OpenMP)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Profile, serial, Kernel::Serial)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Profile, openmp, Kernel::OpenMP)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

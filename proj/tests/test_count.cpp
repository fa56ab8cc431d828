#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace freqgen;
using testing_support::load_fixture;
using testing_support::load_text;
using testing_support::weights;

TEST(Count, Motzkin) {
    auto l = load_fixture("motzkin");
    auto t = build_count_table(l.spec, {}, 6);
    const long expect[] = {1, 1, 2, 4, 9, 21, 51};
    for (int n = 0; n <= 6; ++n) EXPECT_EQ(count(t, "S", n), expect[n]);
    EXPECT_EQ(count(t, "S", 5), 21);
}

TEST(Count, WeightedFibonacci) {
    auto l = load_fixture("fibonacci");
    auto t = build_count_table(l.spec, weights(*l.spec, {{"a", 2}}), 3);
    EXPECT_EQ(count(t, "S", 0), 1);
    EXPECT_EQ(count(t, "S", 1), 2);
    EXPECT_EQ(count(t, "S", 2), 5);
    EXPECT_EQ(count(t, "S", 3), 12);
}

TEST(Count, AtomClassHasNoSizeOneEpsilon) {
    auto l = load_text("S -> a S | _ ;");
    auto t = build_count_table(l.spec, {}, 3);
    for (int c = 0; c < l.spec->size(); ++c)
        if (l.spec->is_epsilon_class(c)) EXPECT_EQ(count(t, c, 1), 0);
}

TEST(Count, Errors) {
    auto l = load_fixture("motzkin");
    auto t = build_count_table(l.spec, {}, 4);
    EXPECT_THROW(count(t, "S", 5), Error);
    EXPECT_THROW(count(t, "Nope", 1), Error);
    EXPECT_THROW(build_count_table(l.spec, {}, -1), Error);
}

TEST(Count, UniformOracleAllFixtures) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        oracle::Oracle o(l.src);
        auto t = build_count_table(l.spec, {}, 12);
        for (int n = 0; n <= 12; ++n) EXPECT_EQ(count(t, l.spec->axiom, n), o.count(l.src.axiom, n)) << name << " n=" << n;
    }
}

TEST(Count, ExplicitEnumerationSmallSizes) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        oracle::Oracle o(l.src);
        auto t = build_count_table(l.spec, {}, 8);
        for (int n = 0; n <= 8; ++n)
            EXPECT_EQ(count(t, l.spec->axiom, n), mpq_class(o.enumerate(l.src.axiom, n).size())) << name << " n=" << n;
    }
}

TEST(Count, WeightedOracleAllFixtures) {
    const mpq_class pool[] = {mpq_class(1, 2), mpq_class(3), mpq_class(2, 7), mpq_class(5, 3), mpq_class(11, 4)};
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        Weights w;
        for (size_t a = 0; a < l.spec->atoms.size(); ++a) w.set(static_cast<int>(a), pool[a % 5]);
        oracle::Oracle o(l.src, w.entries);
        auto t = build_count_table(l.spec, w, 10);
        for (int n = 0; n <= 10; ++n) EXPECT_EQ(count(t, l.spec->axiom, n), o.count(l.src.axiom, n)) << name << " n=" << n;
        // And against the explicit weighted sum over structures.
        for (int n = 0; n <= 6; ++n) {
            mpq_class sum = 0;
            for (const auto& word : o.enumerate(l.src.axiom, n)) sum += o.weight(word);
            EXPECT_EQ(count(t, l.spec->axiom, n), sum) << name << " n=" << n;
        }
    }
}

// count(S, n) as a polynomial in pi_c has the occurrence counts as coefficients.
TEST(Count, PolynomialInOneWeight) {
    auto l = load_fixture("motzkin");
    int c = l.spec->find_atom("c");
    const int n = 14;
    auto g = build_occurrence_table(l.spec, {}, c, n);
    for (mpq_class x : {mpq_class(2), mpq_class(1, 3), mpq_class(7, 2)}) {
        Weights w;
        w.set(c, x);
        auto t = build_count_table(l.spec, w, n);
        for (int m = 0; m <= n; ++m) {
            mpq_class coeff = g.value(l.spec->axiom, n, m);
            EXPECT_GE(coeff, 0);
        }
        mpq_class poly = 0, power = 1;
        for (int m = 0; m <= n; ++m) {
            poly += g.value(l.spec->axiom, n, m) * power;
            power *= x;
        }
        EXPECT_EQ(count(t, l.spec->axiom, n), poly);
    }
}

TEST(Count, PointingMultipliesBySize) {
    auto l = load_text("S -> POINT(A) ; A -> a A | b A A | a ;");
    auto t = build_count_table(l.spec, weights(*l.spec, {{"b", mpq_class(2, 3)}}), 12);
    int S = l.spec->find_class("S"), A = l.spec->find_class("A");
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(count(t, S, n), n * count(t, A, n));
    oracle::Oracle o(l.src, weights(*l.spec, {{"b", mpq_class(2, 3)}}).entries);
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(count(t, S, n), o.count(S, n));
}

TEST(Count, UnpointingDividesBySize) {
    // Cycles of beads: unpointing a pointed sequence.
    auto l = load_text("S -> UNPOINT(A B) ; A -> a | b ; B -> SEQ(A) ;");
    oracle::Oracle o(l.src);
    auto t = build_count_table(l.spec, {}, 12);
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(count(t, l.spec->axiom, n), o.count(l.src.axiom, n)) << n;
    EXPECT_EQ(count(t, l.spec->axiom, 3), mpq_class(8, 3));

    auto w = weights(*l.spec, {{"a", mpq_class(3, 2)}});
    oracle::Oracle ow(l.src, w.entries);
    auto tw = build_count_table(l.spec, w, 10);
    for (int n = 0; n <= 10; ++n) EXPECT_EQ(count(tw, l.spec->axiom, n), ow.count(l.src.axiom, n)) << n;
}

TEST(Count, CacheRoundTrip) {
    auto l = load_fixture("motif");
    auto w = weights(*l.spec, {{"gbar", mpq_class(7, 3)}});
    auto t = build_count_table(l.spec, w, 40);
    std::stringstream buf;
    save_table(t, buf);
    auto back = load_table(buf, l.spec, w);
    ASSERT_EQ(back.n_max, 40);
    for (int c = 0; c < l.spec->size(); ++c)
        for (int n = 0; n <= 40; ++n) EXPECT_EQ(count(back, c, n), count(t, c, n));

    std::stringstream again(buf.str());
    EXPECT_THROW(load_table(again, l.spec, {}), Error);
    std::stringstream junk("not a table");
    EXPECT_THROW(load_table(junk, l.spec, w), Error);
}

TEST(Count, FingerprintDependsOnWeights) {
    auto l = load_fixture("motzkin");
    EXPECT_NE(table_fingerprint(*l.spec, {}), table_fingerprint(*l.spec, weights(*l.spec, {{"c", 2}})));
    EXPECT_EQ(table_fingerprint(*l.spec, {}), table_fingerprint(*l.spec, weights(*l.spec, {{"c", 1}})));
}

TEST(Count, SerialAndParallelKernelsAgree) {
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{{"motzkin", 300}, {"rna", 120}, {"quadtree", 120}}) {
        auto l = load_fixture(name);
        Weights w;
        w.set(0, mpq_class(3, 2));
        auto a = build_count_table(l.spec, w, n, {Kernel::Serial});
        auto b = build_count_table(l.spec, w, n, {Kernel::OpenMP});
        for (int c = 0; c < l.spec->size(); ++c)
            for (int k = 0; k <= n; ++k) ASSERT_EQ(a.scaled(c, k), b.scaled(c, k)) << name;
    }
}

TEST(Kernels, ConvolutionsAgree) {
    std::vector<mpz_class> a(50), b(50), fac(50);
    for (int i = 0; i < 50; ++i) {
        a[i] = (i * 7919) % 101 - 30;
        b[i] = (i % 3 == 0) ? mpz_class(0) : mpz_class(i * i);
        fac[i] = i + 1;
    }
    for (int n = 0; n < 50; ++n) {
        mpz_class x, y, ref = 0;
        for (int k = 0; k <= n; ++k) ref += a[k] * b[n - k] * fac[k];
        convolve_at_serial(a, b, n, &fac, x);
        convolve_at_omp(a, b, n, &fac, y);
        EXPECT_EQ(x, ref);
        EXPECT_EQ(y, ref);
    }
    std::vector<long double> fa(30), fb(30);
    for (int i = 0; i < 30; ++i) {
        fa[i] = 1.0L / (i + 1);
        fb[i] = i * 0.5L;
    }
    for (int n = 0; n < 30; ++n)
        EXPECT_NEAR(static_cast<double>(convolve_at_serial(fa, fb, n)), static_cast<double>(convolve_at_omp(fa, fb, n)),
                    1e-12);
}

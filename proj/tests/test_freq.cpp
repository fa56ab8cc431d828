#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace freqgen;
using testing_support::load_fixture;
using testing_support::load_text;
using testing_support::weights;

namespace {

// Mean occurrences of `atom` by exhaustive enumeration.
mpq_class brute_mean(oracle::Oracle& o, int cls, int atom, int n) {
    mpq_class num = 0, den = 0;
    for (const auto& w : o.enumerate(cls, n)) {
        mpq_class p = o.weight(w);
        long k = std::count(w.begin(), w.end(), atom);
        num += k * p;
        den += p;
    }
    return num / den;
}

// Mean occurrences from counts alone: with C(x) the weighted count as a
// polynomial in the weight x of `atom`, the mean is x C'(x) / C(x).  The
// polynomial is recovered by interpolation at n+1 points.
mpq_class interpolated_mean(const Specification& src, std::map<int, mpq_class> w, int atom, int n) {
    mpq_class x0 = w.count(atom) ? w[atom] : mpq_class(1);
    std::vector<mpq_class> xs, ys;
    for (int i = 0; i <= n; ++i) {
        mpq_class x = i + 1;
        auto wi = w;
        wi[atom] = x;
        oracle::Oracle o(src, wi);
        xs.push_back(x);
        ys.push_back(o.count(src.axiom, n));
    }
    // Newton divided differences, then value and derivative at x0.
    std::vector<mpq_class> coef = ys;
    for (int j = 1; j <= n; ++j)
        for (int i = n; i >= j; --i) coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j]);
    mpq_class p = coef[n], dp = 0;
    for (int i = n - 1; i >= 0; --i) {
        dp = dp * (x0 - xs[i]) + p;
        p = p * (x0 - xs[i]) + coef[i];
    }
    return x0 * dp / p;
}

}  // namespace

TEST(Freq, MotzkinSmall) {
    auto l = load_fixture("motzkin");
    int c = l.spec->find_atom("c");
    EXPECT_EQ(freq_dp(l.spec, {}, c, 3), mpq_class(3, 2));
    EXPECT_EQ(freq_via_pointing(l.spec, {}, c, 3), mpq_class(3, 2));
    EXPECT_EQ(freq_dp(l.spec, weights(*l.spec, {{"c", 5}}), c, 0), 0);
    EXPECT_EQ(freq_via_pointing(l.spec, weights(*l.spec, {{"c", 5}}), c, 0), 0);

    auto prof = frequency_profile(l.spec, {}, 3);
    EXPECT_EQ(prof[l.spec->find_atom("a")], mpq_class(1, 4));
    EXPECT_EQ(prof[l.spec->find_atom("b")], mpq_class(1, 4));
    EXPECT_EQ(prof[c], mpq_class(1, 2));
}

TEST(Freq, PointedSpecExamples) {
    auto single = load_text("S -> a ; U -> b ;");
    int a = single.spec->find_atom("a"), b = single.spec->find_atom("b");
    PointedSpec pa = point_spec(*single.spec, a);
    int sa = pa.companion(a, single.spec->axiom);
    ASSERT_GE(sa, 0);
    auto ta = build_count_table(pa.spec, {}, 2);
    EXPECT_EQ(count(ta, sa, 1), 1);
    EXPECT_EQ(count(ta, sa, 2), 0);
    PointedSpec pb = point_spec(*single.spec, b);
    EXPECT_EQ(pb.companion(b, single.spec->axiom), -1);

    auto l = load_fixture("motzkin");
    int c = l.spec->find_atom("c");
    PointedSpec pc = point_spec(*l.spec, c);
    auto t = build_count_table(pc.spec, {}, 3);
    EXPECT_EQ(count(t, pc.companion(c, l.spec->axiom), 3), 6);
}

TEST(Freq, EnginesAgreeOnFixtures) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        auto w = Weights::from_spec(l.src);
        int n = (name.rfind("rna", 0) == 0 || name == "quadtree") ? 25 : 40;
        auto t = build_count_table(l.spec, w, n);
        for (size_t a = 0; a < l.spec->atoms.size(); ++a)
            for (int k : {1, 2, 7, n}) {
                if (t.scaled(l.spec->axiom, k) == 0) continue;
                EXPECT_EQ(freq_dp(l.spec, w, static_cast<int>(a), k), freq_via_pointing(l.spec, w, static_cast<int>(a), k))
                    << name << " atom " << a << " n=" << k;
            }
    }
}

TEST(Freq, BruteForceAgreement) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        Weights w;
        for (size_t a = 0; a < l.spec->atoms.size(); ++a)
            w.set(static_cast<int>(a), mpq_class(static_cast<long>(a % 3 + 1), static_cast<long>(a % 2 + 1)));
        oracle::Oracle o(l.src, w.entries);
        auto t = build_count_table(l.spec, w, 8);
        for (int n = 1; n <= 8; ++n) {
            if (t.scaled(l.spec->axiom, n) == 0) continue;
            for (size_t a = 0; a < l.spec->atoms.size(); ++a) {
                mpq_class expect = brute_mean(o, l.src.axiom, static_cast<int>(a), n);
                EXPECT_EQ(freq_dp(l.spec, w, static_cast<int>(a), n), expect) << name << " n=" << n;
                EXPECT_EQ(freq_via_pointing(l.spec, w, static_cast<int>(a), n), expect) << name << " n=" << n;
            }
        }
    }
}

TEST(Freq, PointingRulesFollowTheOccurrenceRoute) {
    auto p = load_text("S -> POINT(A) ; A -> a A | b A A | a ;");
    auto wp = weights(*p.spec, {{"b", mpq_class(3, 2)}});
    oracle::Oracle op(p.src, wp.entries);
    for (int n = 1; n <= 7; ++n)
        for (const char* name : {"a", "b"}) {
            int atom = p.spec->find_atom(name);
            EXPECT_EQ(freq_dp(p.spec, wp, atom, n), brute_mean(op, p.src.axiom, atom, n)) << n;
        }

    auto u = load_text("S -> UNPOINT(A B) ; A -> a | b ; B -> SEQ(A) ;");
    auto wu = weights(*u.spec, {{"a", mpq_class(2, 3)}});
    for (int n = 1; n <= 7; ++n) {
        int a = u.spec->find_atom("a");
        EXPECT_EQ(freq_dp(u.spec, wu, a, n), interpolated_mean(u.src, wu.entries, a, n)) << n;
        auto prof = frequency_profile(u.spec, wu, n);
        EXPECT_EQ(prof[a] + prof[u.spec->find_atom("b")], 1);
    }
}

TEST(Freq, MassConservation) {
    for (const auto& name : {"motzkin", "rna", "quadtree", "stemloop"}) {
        auto l = load_fixture(name);
        Weights w;
        w.set(0, mpq_class(5, 4));
        auto t = build_count_table(l.spec, w, 20);
        for (size_t a = 0; a < l.spec->atoms.size(); ++a) {
            auto g = build_occurrence_table(l.spec, w, static_cast<int>(a), 20);
            for (int c = 0; c < l.spec->size(); ++c)
                for (int n = 0; n <= 20; ++n) {
                    mpq_class sum = 0;
                    for (int m = 0; m <= n; ++m) sum += g.value(c, n, m);
                    EXPECT_EQ(sum, count(t, c, n)) << name;
                    EXPECT_EQ(g.total(c, n), count(t, c, n)) << name;
                }
        }
    }
}

TEST(Freq, MonotoneInOwnWeight) {
    auto m = load_fixture("motzkin");
    auto f = load_fixture("fibonacci");
    for (auto [l, atom] : {std::pair{&m, "c"}, std::pair{&f, "a"}}) {
        int a = l->spec->find_atom(atom);
        mpq_class prev = -1;
        for (mpq_class x : {mpq_class(1, 4), mpq_class(1, 2), mpq_class(1), mpq_class(2), mpq_class(9, 2)}) {
            Weights w;
            w.set(a, x);
            mpq_class v = freq_dp(l->spec, w, a, 20);
            EXPECT_GT(v, prev) << atom;
            prev = v;
        }
    }
}

TEST(Freq, ProfileSumsToOne) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        auto w = Weights::from_spec(l.src);
        auto prof = frequency_profile(l.spec, w, 21);
        mpq_class sum = 0;
        for (auto& [a, v] : prof) sum += v;
        EXPECT_EQ(sum, 1) << name;
    }
}

TEST(Freq, FibonacciTendsToInverseRootFive) {
    auto l = load_fixture("fibonacci");
    int a = l.spec->find_atom("a");
    double f = mpq_class(freq_via_pointing(l.spec, {}, a, 400) / 400).get_d();
    EXPECT_NEAR(f, 1 / std::sqrt(5.0), 5e-3);
}

TEST(Freq, RnaHairpinOpenerUniform) {
    auto l = load_fixture("rna");
    int H = l.spec->find_atom("H");
    double f = mpq_class(freq_via_pointing(l.spec, {}, H, 300) / 300).get_d();
    EXPECT_NEAR(f, 0.186, 5e-4);
}

TEST(Freq, FloatEvaluatorMatchesExact) {
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{
             {"motzkin", 60}, {"rna_loops", 80}, {"quadtree_balanced", 80}, {"motif", 50}}) {
        auto l = load_fixture(name);
        auto w = Weights::from_spec(l.src);
        if (name == "motzkin") w.set(l.spec->find_atom("c"), mpq_class(7, 3));
        std::vector<int> atoms;
        for (size_t a = 0; a < l.spec->atoms.size(); ++a) atoms.push_back(static_cast<int>(a));
        auto exact = frequency_profile(l.spec, w, n, atoms);
        std::vector<double> wd;
        for (size_t a = 0; a < l.spec->atoms.size(); ++a) wd.push_back(w.get(static_cast<int>(a)).get_d());
        for (Kernel k : {Kernel::Serial, Kernel::OpenMP}) {
            ProfileEvaluator ev(l.spec, atoms, n, k);
            auto got = ev.evaluate(wd);
            for (size_t i = 0; i < atoms.size(); ++i)
                EXPECT_NEAR(got[i], exact[atoms[i]].get_d(), 1e-12) << name << " atom " << atoms[i];
        }
    }
    auto p = load_text("S -> POINT(A) ; A -> a A | b A A | a ;");
    ProfileEvaluator ev(p.spec, {0, 1}, 30);
    auto got = ev.evaluate({1.0, 1.5});
    auto exact = frequency_profile(p.spec, weights(*p.spec, {{"b", mpq_class(3, 2)}}), 30, {0, 1});
    EXPECT_NEAR(got[0], exact[0].get_d(), 1e-12);
    EXPECT_NEAR(got[1], exact[1].get_d(), 1e-12);
}

TEST(Freq, ExtremeWeightsStayFinite) {
    auto l = load_fixture("rna_helix");
    std::vector<int> atoms = {0, 1, 2};
    ProfileEvaluator ev(l.spec, atoms, 300);
    for (double x : {1e-12, 1e12}) {
        std::vector<double> w(l.spec->atoms.size(), 1.0);
        w[l.spec->find_atom("H")] = x;
        auto got = ev.evaluate(w);
        for (double v : got) EXPECT_TRUE(std::isfinite(v));
    }
}

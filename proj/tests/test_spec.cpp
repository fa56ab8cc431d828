#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace freqgen;
using testing_support::load_fixture;
using testing_support::load_text;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

}  // namespace

TEST(Parse, MotzkinShape) {
    Specification s = parse_spec("S -> a S b S | c S | _ ;");
    EXPECT_EQ(s.classes.size(), 1u);
    EXPECT_EQ(s.atoms.size(), 3u);
    ASSERT_EQ(s.productions[0].kind, Expr::Kind::Union);
    EXPECT_EQ(s.productions[0].items.size(), 3u);
}

TEST(Parse, EpsilonOnly) {
    auto l = load_text("S -> _ ;");
    auto t = build_count_table(l.spec, {}, 3);
    EXPECT_EQ(count(t, 0, 0), 1);
    for (int n = 1; n <= 3; ++n) EXPECT_EQ(count(t, 0, n), 0);
}

TEST(Parse, FibonacciShape) {
    Specification s = parse_spec("S -> a S | b b S | _ ;");
    EXPECT_EQ(s.classes.size(), 1u);
    EXPECT_EQ(s.atoms.size(), 2u);
}

TEST(Parse, DeclarationsAndQuotes) {
    Specification s = parse_spec(
        "# comment\naxiom T ;\nS -> '+' S | 'x' ;\nT -> S S ;\n"
        "weight '+' = 3/2 ;\ntarget x = 0.25 ;\ndisplay x = y ;\n");
    EXPECT_EQ(s.axiom, s.find_class("T"));
    int plus = s.find_atom("+");
    ASSERT_GE(plus, 0);
    EXPECT_EQ(s.weights.at(plus), mpq_class(3, 2));
    EXPECT_EQ(s.targets.at(s.find_atom("x")), mpq_class(1, 4));
    EXPECT_EQ(s.atoms[s.find_atom("x")].display, "y");
}

TEST(Parse, Rationals) {
    EXPECT_EQ(parse_rational("0.0711964"), mpq_class(711964) / 10000000);
    EXPECT_EQ(parse_rational("3.42e-3"), mpq_class(342) / 100000);
    EXPECT_EQ(parse_rational("12"), 12);
    EXPECT_EQ(parse_rational("1/3"), mpq_class(1, 3));
    EXPECT_EQ(parse_rational("1.5E2"), 150);
    EXPECT_EQ(parse_rational("-1/2"), mpq_class(-1, 2));
}

TEST(Parse, ErrorsCarryPositions) {
    const std::vector<std::string> bad = {"S -> a", "S -> ( ;", "S a ;", "S -> a | ;;", "-> a ;", "S -> 'a ;"};
    for (const auto& text : bad) {
        try {
            parse_spec(text);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const SyntaxError& e) {
            EXPECT_GE(e.line(), 1) << text;
            EXPECT_GE(e.column(), 1) << text;
        } catch (const Error& e) {
            ADD_FAILURE() << "wrong error for " << text << ": " << e.what();
        }
    }
    try {
        parse_spec("S -> a ;\nT -> b ) ;");
        ADD_FAILURE();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(Parse, SemanticErrors) {
    EXPECT_EQ(code_of([] { parse_spec("S -> a ; S -> b ;"); }), ErrorCode::DuplicateRule);
    EXPECT_EQ(code_of([] { parse_spec("axiom X ; S -> a ;"); }), ErrorCode::UndeclaredAxiom);
    EXPECT_EQ(code_of([] { parse_spec("S -> a S | _ ; weight S = 2 ;"); }), ErrorCode::WeightForNonAtom);
    EXPECT_EQ(code_of([] { parse_spec("S -> a S | _ ; weight a = -1 ;"); }), ErrorCode::InvalidWeight);
    EXPECT_EQ(code_of([] { parse_spec("S -> a S | _ ; weight q = 2 ;"); }), ErrorCode::UnknownAtom);
}

TEST(Standardize, SequenceIsAllOnes) {
    auto l = load_text("S -> SEQ(a) ;");
    auto t = build_count_table(l.spec, {}, 10);
    for (int n = 0; n <= 10; ++n) EXPECT_EQ(count(t, 0, n), 1);
    EXPECT_FALSE(l.report.introduced_classes.empty());
}

TEST(Standardize, RulesAreBinary) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        const StandardSpec& s = *l.spec;
        for (int c = 0; c < s.size(); ++c) {
            const StdRule& r = s.rules[c];
            switch (r.kind) {
            case Rule::Epsilon: break;
            case Rule::Atom: EXPECT_GE(r.a, 0); break;
            case Rule::Union:
            case Rule::Product:
            case Rule::UnpointProduct:
                EXPECT_GE(r.a, 0);
                EXPECT_GE(r.b, 0);
                EXPECT_LT(r.b, s.size());
                break;
            case Rule::Point: EXPECT_GE(r.a, 0); break;
            }
        }
    }
}

TEST(Standardize, MotzkinCountsPreserved) {
    auto l = load_fixture("motzkin");
    EXPECT_FALSE(l.report.introduced_classes.empty());
    auto t = build_count_table(l.spec, {}, 6);
    const long expect[] = {1, 1, 2, 4, 9, 21, 51};
    for (int n = 0; n <= 6; ++n) EXPECT_EQ(count(t, l.spec->axiom, n), expect[n]);
}

TEST(Standardize, PreservesCountsOnEveryFixture) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        oracle::Oracle o(l.src);
        auto t = build_count_table(l.spec, {}, 12);
        for (int c = 0; c < static_cast<int>(l.src.classes.size()); ++c)
            for (int n = 0; n <= 12; ++n) EXPECT_EQ(count(t, c, n), o.count(c, n)) << name << " " << c << " " << n;
    }
}

TEST(Standardize, RejectsEpsilonCycle) {
    EXPECT_EQ(code_of([] { load_text("S -> S ;"); }), ErrorCode::EpsilonCycle);
    EXPECT_EQ(code_of([] { load_text("S -> T | a ; T -> S ;"); }), ErrorCode::EpsilonCycle);
    EXPECT_EQ(code_of([] { load_text("S -> SEQ(T) ; T -> a | _ ;"); }), ErrorCode::EpsilonCycle);
}

TEST(Standardize, RejectsUnproductive) {
    EXPECT_EQ(code_of([] { load_text("S -> a S ;"); }), ErrorCode::UnproductiveClass);
}

TEST(Validate, Periods) {
    auto fib = load_fixture("fibonacci");
    EXPECT_TRUE(fib.report.is_regular);
    ASSERT_EQ(fib.report.scc_decomposition.size(), 1u);
    EXPECT_EQ(fib.report.cycle_gcd_per_scc[0], 1);

    auto motz = load_fixture("motzkin");
    EXPECT_FALSE(motz.report.is_regular);
    EXPECT_TRUE(motz.report.is_context_free);
    for (int g : motz.report.cycle_gcd_per_scc) EXPECT_EQ(g, 1);

    auto motif = load_fixture("motif");
    EXPECT_TRUE(motif.report.is_regular);
    for (int g : motif.report.cycle_gcd_per_scc) EXPECT_EQ(g, 1);

    auto even = load_text("S -> a a S | _ ;");
    ASSERT_EQ(even.report.cycle_gcd_per_scc.size(), 1u);
    EXPECT_EQ(even.report.cycle_gcd_per_scc[0], 2);
}

TEST(Validate, AllFixturesProductive) {
    for (const auto& name : testing_support::fixture_names()) {
        auto l = load_fixture(name);
        EXPECT_TRUE(l.report.productive) << name;
        auto again = validate(*l.spec);
        EXPECT_EQ(again.is_regular, l.report.is_regular) << name;
    }
}

TEST(ClassifyRegular, Fibonacci) {
    auto l = load_fixture("fibonacci");
    TransferDescription td = classify_regular(*l.spec);
    int S = l.spec->axiom;
    int a = l.spec->find_atom("a"), b = l.spec->find_atom("b");
    int s_state = -1;
    for (int i = 0; i < td.num_states(); ++i)
        if (td.states[i] == S) s_state = i;
    ASSERT_GE(s_state, 0);
    EXPECT_EQ(td.initial, s_state);
    EXPECT_TRUE(td.accepting[s_state]);
    EXPECT_EQ(td.labels(s_state, s_state), std::vector<int>{a});
    // bb goes through exactly one intermediate state.
    int middle = 0;
    for (int i = 0; i < td.num_states(); ++i) {
        if (i == s_state) continue;
        auto in = td.labels(s_state, i);
        auto out = td.labels(i, s_state);
        if (in == std::vector<int>{b} && out == std::vector<int>{b}) ++middle;
    }
    EXPECT_EQ(middle, 1);
}

TEST(ClassifyRegular, MotifAutomaton) {
    auto l = load_fixture("motif");
    TransferDescription td = classify_regular(*l.spec);
    int live = 0;
    for (int i = 0; i < td.num_states(); ++i) {
        bool used = false;
        for (const auto& tr : td.transitions) used |= tr.from == i || tr.to == i;
        if (!used) continue;
        ++live;
        EXPECT_TRUE(td.accepting[i]);
    }
    EXPECT_EQ(live, 3);
    int outgoing = 0;
    for (const auto& tr : td.transitions)
        if (tr.atom >= 0) ++outgoing;
    EXPECT_EQ(outgoing, 12);
}

TEST(ClassifyRegular, MotzkinRefused) {
    auto l = load_fixture("motzkin");
    EXPECT_EQ(code_of([&] { classify_regular(*l.spec); }), ErrorCode::NotRegular);
}

TEST(Fingerprint, StableAndDiscriminating) {
    auto a = load_fixture("motzkin");
    auto b = load_fixture("motzkin");
    auto c = load_fixture("fibonacci");
    EXPECT_EQ(spec_fingerprint(*a.spec), spec_fingerprint(*b.spec));
    EXPECT_NE(spec_fingerprint(*a.spec), spec_fingerprint(*c.spec));
    EXPECT_EQ(spec_fingerprint(*a.spec).size(), 16u);
}

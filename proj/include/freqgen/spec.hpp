#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace freqgen {

struct Expr {
    enum class Kind { Epsilon, Atom, ClassRef, Union, Product, Sequence, Point, Unpoint };
    Kind kind = Kind::Epsilon;
    int id = -1;  // atom index or class index
    std::vector<Expr> items;

    static Expr epsilon() { return Expr{}; }
    static Expr atom(int a) { return Expr{Kind::Atom, a, {}}; }
    static Expr ref(int c) { return Expr{Kind::ClassRef, c, {}}; }
    static Expr node(Kind k, std::vector<Expr> xs) { return Expr{k, -1, std::move(xs)}; }
};

struct AtomInfo {
    std::string name;
    std::string display;
};

// Parsed grammar as written in the source file.
struct Specification {
    int axiom = 0;
    std::vector<std::string> classes;
    std::vector<AtomInfo> atoms;
    std::vector<Expr> productions;
    std::vector<int> distinguished;
    std::map<int, mpq_class> weights;
    std::map<int, mpq_class> targets;

    int find_class(const std::string& name) const;
    int find_atom(const std::string& name) const;
};

Specification parse_spec(const std::string& text);
Specification load_spec(const std::string& path);

// Exact rational from "p/q", "12", "0.0711964" or "3.42e-3".
mpq_class parse_rational(const std::string& s);

enum class Rule { Epsilon, Atom, Union, Product, Point, UnpointProduct };

struct StdRule {
    Rule kind = Rule::Epsilon;
    int a = -1;  // atom index for Atom, left operand otherwise
    int b = -1;
};

// Specification in standard form: every class has exactly one rule of kind Rule.
// Classes 0..source_classes-1 keep the indices of the parsed specification.
struct StandardSpec {
    std::vector<std::string> names;
    std::vector<StdRule> rules;
    std::vector<std::string> provenance;
    std::vector<AtomInfo> atoms;
    int axiom = 0;
    int source_classes = 0;
    std::vector<int> distinguished;

    // Filled by analyze().
    std::vector<char> nullable;
    std::vector<int> min_size;
    std::vector<int> zero_order;  // evaluation order at size 0 (nullable classes only)
    std::vector<int> pos_order;   // evaluation order at every size > 0
    bool has_pointing = false;    // any Point or UnpointProduct rule
    bool has_unpoint = false;

    int size() const { return static_cast<int>(rules.size()); }
    int find_class(const std::string& name) const;
    int find_atom(const std::string& name) const;
    bool is_atom_class(int c) const { return rules[c].kind == Rule::Atom; }
    bool is_epsilon_class(int c) const { return rules[c].kind == Rule::Epsilon; }
};

struct IntroducedClass {
    std::string name;
    std::string provenance;
};

struct StandardizationReport {
    std::vector<IntroducedClass> introduced_classes;
    bool productive = true;
    bool is_regular = false;
    bool is_context_free = false;
    std::vector<std::vector<int>> scc_decomposition;  // cyclic components only
    std::vector<int> cycle_gcd_per_scc;
};

struct Standardized {
    std::shared_ptr<const StandardSpec> spec;
    StandardizationReport report;
};

// Desugars to binary standard form and checks well-foundedness.
// Throws UnproductiveClass or EpsilonCycle.
Standardized standardize(const Specification& spec);

// Computes nullability, minimal sizes and evaluation orders; throws on
// epsilon cycles and unproductive classes.
void analyze(StandardSpec& s);

StandardizationReport validate(const StandardSpec& s);

struct Transition {
    int from;
    int to;
    int atom;  // -1 for an epsilon move
};

// Right-linear view of a regular specification.  States are standard classes
// reachable from the axiom plus one final state (index final_state) entered
// after a trailing atom.
struct TransferDescription {
    std::vector<int> states;  // standard class per state, -1 for the final state
    std::vector<Transition> transitions;
    std::vector<char> accepting;
    int initial = 0;
    int final_state = -1;

    int num_states() const { return static_cast<int>(states.size()); }
    std::vector<int> labels(int i, int j) const;
};

TransferDescription classify_regular(const StandardSpec& s);

// Stable 64-bit hash of the standard form, rendered as 16 hex digits.
std::string spec_fingerprint(const StandardSpec& s);

std::string describe_rule(const StandardSpec& s, int c);

}  // namespace freqgen

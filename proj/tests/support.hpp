#pragma once

#include "freqgen/freqgen.hpp"
#include "oracle.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace testing_support {

inline std::string fixture_path(const std::string& name) {
    return std::string(FREQGEN_FIXTURES) + "/" + name + ".grammar";
}

// Every grammar shipped in fixtures/, under its file stem.
inline const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = {"motzkin", "fibonacci", "motif",      "stemloop", "quadtree",
                                                   "arith",   "rna",       "rna_helix", "rna_loops"};
    return names;
}

struct Loaded {
    freqgen::Specification src;
    std::shared_ptr<const freqgen::StandardSpec> spec;
    freqgen::StandardizationReport report;
};

inline Loaded load_text(const std::string& text) {
    Loaded l;
    l.src = freqgen::parse_spec(text);
    auto st = freqgen::standardize(l.src);
    l.spec = st.spec;
    l.report = st.report;
    return l;
}

inline Loaded load_fixture(const std::string& name) {
    Loaded l;
    l.src = freqgen::load_spec(fixture_path(name));
    auto st = freqgen::standardize(l.src);
    l.spec = st.spec;
    l.report = st.report;
    return l;
}

inline freqgen::Weights weights(const freqgen::StandardSpec& s, const std::map<std::string, mpq_class>& w) {
    freqgen::Weights out;
    for (const auto& [name, v] : w) out.set(s.find_atom(name), v);
    return out;
}

inline std::map<int, mpq_class> oracle_weights(const freqgen::Weights& w) { return w.entries; }

inline double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace testing_support

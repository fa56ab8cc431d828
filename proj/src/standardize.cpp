#include "freqgen/error.hpp"
#include "freqgen/spec.hpp"

#include <algorithm>
#include <climits>
#include <cstdio>
#include <functional>
#include <numeric>
#include <queue>

namespace freqgen {

namespace {

constexpr int kInf = INT_MAX / 4;

class Builder {
public:
    Builder(const Specification& src, StandardSpec& out) : src_(src), s_(out) {
        s_.atoms = src.atoms;
        s_.axiom = src.axiom;
        s_.distinguished = src.distinguished;
        s_.source_classes = static_cast<int>(src.classes.size());
        for (const auto& name : src.classes) add(name, "");
        atom_class_.assign(src.atoms.size(), -1);
    }

    void run() {
        for (int c = 0; c < s_.source_classes; ++c) define(c, src_.productions[c], src_.classes[c]);
    }

    std::vector<IntroducedClass> introduced;

private:
    int add(const std::string& name, const std::string& prov) {
        s_.names.push_back(name);
        s_.rules.push_back({});
        s_.provenance.push_back(prov);
        int id = static_cast<int>(s_.rules.size()) - 1;
        if (!prov.empty()) introduced.push_back({name, prov});
        return id;
    }

    int fresh(const std::string& owner, const std::string& prov) {
        int k = ++counter_[owner];
        return add(owner + "#" + std::to_string(k), prov + " in " + owner);
    }

    int eps() {
        if (eps_ < 0) {
            eps_ = add("<eps>", "empty structure");
            s_.rules[eps_] = {Rule::Epsilon, -1, -1};
        }
        return eps_;
    }

    int atom_class(int a) {
        if (atom_class_[a] < 0) {
            atom_class_[a] = add("<" + s_.atoms[a].name + ">", "atom " + s_.atoms[a].name);
            s_.rules[atom_class_[a]] = {Rule::Atom, a, -1};
        }
        return atom_class_[a];
    }

    int operand(const Expr& e, const std::string& owner, const char* prov) {
        switch (e.kind) {
        case Expr::Kind::ClassRef: return e.id;
        case Expr::Kind::Atom: return atom_class(e.id);
        case Expr::Kind::Epsilon: return eps();
        default: break;
        }
        int c = fresh(owner, prov);
        define(c, e, owner);
        return c;
    }

    int tail(const std::vector<Expr>& xs, Expr::Kind k, const std::string& owner, const char* prov) {
        if (xs.size() == 2) return operand(xs[1], owner, prov);
        Expr rest = Expr::node(k, std::vector<Expr>(xs.begin() + 1, xs.end()));
        return operand(rest, owner, prov);
    }

    void set(int c, Rule k, int a, int b) { s_.rules[c] = {k, a, b}; }

    void define(int c, const Expr& e, const std::string& owner) {
        switch (e.kind) {
        case Expr::Kind::Epsilon: set(c, Rule::Epsilon, -1, -1); return;
        case Expr::Kind::Atom: set(c, Rule::Atom, e.id, -1); return;
        case Expr::Kind::ClassRef: set(c, Rule::Product, eps(), e.id); return;
        case Expr::Kind::Union:
        case Expr::Kind::Product: {
            if (e.items.size() == 1) {
                define(c, e.items[0], owner);
                return;
            }
            bool uni = e.kind == Expr::Kind::Union;
            int a = operand(e.items[0], owner, uni ? "union operand" : "product operand");
            int b = tail(e.items, e.kind, owner, uni ? "union tail" : "product tail");
            set(c, uni ? Rule::Union : Rule::Product, a, b);
            return;
        }
        case Expr::Kind::Sequence: {
            int body = operand(e.items[0], owner, "sequence element");
            int p = fresh(owner, "sequence step");
            set(p, Rule::Product, body, c);
            set(c, Rule::Union, eps(), p);
            return;
        }
        case Expr::Kind::Point: {
            int a = operand(e.items[0], owner, "pointed operand");
            set(c, Rule::Point, a, -1);
            return;
        }
        case Expr::Kind::Unpoint: {
            const Expr& in = e.items[0];
            if (in.kind == Expr::Kind::Product && in.items.size() >= 2) {
                int a = operand(in.items[0], owner, "unpointed factor");
                int b = tail(in.items, Expr::Kind::Product, owner, "unpointed tail");
                set(c, Rule::UnpointProduct, a, b);
            } else {
                int a = operand(in, owner, "unpointed operand");
                set(c, Rule::UnpointProduct, a, eps());
            }
            return;
        }
        }
    }

    const Specification& src_;
    StandardSpec& s_;
    std::vector<int> atom_class_;
    std::map<std::string, int> counter_;
    int eps_ = -1;
};

// Kahn order over edges c -> dep meaning "c needs dep first".  Returns false
// and a cycle when the graph is cyclic.
bool topo(const std::vector<std::vector<int>>& deps, const std::vector<char>& active,
          std::vector<int>& order, std::vector<int>& cycle) {
    int n = static_cast<int>(deps.size());
    std::vector<int> pending(n, 0);
    std::vector<std::vector<int>> users(n);
    for (int c = 0; c < n; ++c) {
        if (!active[c]) continue;
        for (int d : deps[c]) {
            if (!active[d]) continue;
            ++pending[c];
            users[d].push_back(c);
        }
    }
    std::queue<int> q;
    for (int c = 0; c < n; ++c)
        if (active[c] && pending[c] == 0) q.push(c);
    order.clear();
    while (!q.empty()) {
        int c = q.front();
        q.pop();
        order.push_back(c);
        for (int u : users[c])
            if (--pending[u] == 0) q.push(u);
    }
    int total = 0;
    for (int c = 0; c < n; ++c) total += active[c] ? 1 : 0;
    if (static_cast<int>(order.size()) == total) return true;

    // Walk backwards through unresolved nodes until one repeats.
    std::vector<int> pos(n, -1);
    int c = -1;
    for (int i = 0; i < n && c < 0; ++i)
        if (active[i] && pending[i] > 0) c = i;
    std::vector<int> path;
    while (pos[c] < 0) {
        pos[c] = static_cast<int>(path.size());
        path.push_back(c);
        for (int d : deps[c])
            if (active[d] && pending[d] > 0) {
                c = d;
                break;
            }
    }
    cycle.assign(path.begin() + pos[c], path.end());
    return false;
}

std::string cycle_text(const StandardSpec& s, const std::vector<int>& cyc) {
    std::string t;
    for (int c : cyc) t += s.names[c] + " -> ";
    return t + s.names[cyc.front()];
}

}  // namespace

int StandardSpec::find_class(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (names[i] == name) return i;
    return -1;
}

int StandardSpec::find_atom(const std::string& name) const {
    for (size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i].name == name) return static_cast<int>(i);
    return -1;
}

void analyze(StandardSpec& s) {
    int n = s.size();
    s.has_pointing = s.has_unpoint = false;
    for (const auto& r : s.rules) {
        if (r.kind == Rule::Point || r.kind == Rule::UnpointProduct) s.has_pointing = true;
        if (r.kind == Rule::UnpointProduct) s.has_unpoint = true;
    }

    auto& nul = s.nullable;
    nul.assign(n, 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (int c = 0; c < n; ++c) {
            const StdRule& r = s.rules[c];
            bool v = false;
            switch (r.kind) {
            case Rule::Epsilon: v = true; break;
            case Rule::Atom: v = false; break;
            case Rule::Union: v = nul[r.a] || nul[r.b]; break;
            case Rule::Product: v = nul[r.a] && nul[r.b]; break;
            case Rule::Point:
            case Rule::UnpointProduct: v = false; break;
            }
            if (v && !nul[c]) {
                nul[c] = 1;
                changed = true;
            }
        }
    }

    // Same-size dependencies at sizes > 0.
    std::vector<std::vector<int>> pos(n), zero(n);
    for (int c = 0; c < n; ++c) {
        const StdRule& r = s.rules[c];
        switch (r.kind) {
        case Rule::Union:
            pos[c] = {r.a, r.b};
            if (nul[c]) {
                if (nul[r.a]) zero[c].push_back(r.a);
                if (nul[r.b]) zero[c].push_back(r.b);
            }
            break;
        case Rule::Product:
        case Rule::UnpointProduct:
            if (nul[r.a]) pos[c].push_back(r.b);
            if (nul[r.b]) pos[c].push_back(r.a);
            if (r.kind == Rule::Product && nul[c]) zero[c] = {r.a, r.b};
            break;
        case Rule::Point: pos[c] = {r.a}; break;
        default: break;
        }
    }
    std::vector<int> cycle;
    std::vector<char> all(n, 1);
    if (!topo(pos, all, s.pos_order, cycle))
        throw Error(ErrorCode::EpsilonCycle, "size-preserving cycle: " + cycle_text(s, cycle));
    if (!topo(zero, nul, s.zero_order, cycle))
        throw Error(ErrorCode::EpsilonCycle, "cycle of empty structures: " + cycle_text(s, cycle));

    // Minimal sizes; minpos is the least positive size.
    std::vector<int> mn(n, kInf), mp(n, kInf);
    auto add = [](int x, int y) { return (x >= kInf || y >= kInf) ? kInf : x + y; };
    for (bool changed = true; changed;) {
        changed = false;
        for (int c = 0; c < n; ++c) {
            const StdRule& r = s.rules[c];
            int a = kInf, p = kInf;
            switch (r.kind) {
            case Rule::Epsilon: a = 0; break;
            case Rule::Atom: a = p = 1; break;
            case Rule::Union:
                a = std::min(mn[r.a], mn[r.b]);
                p = std::min(mp[r.a], mp[r.b]);
                break;
            case Rule::Product:
            case Rule::UnpointProduct:
                p = std::min(add(mp[r.a], mn[r.b]), add(mn[r.a], mp[r.b]));
                a = r.kind == Rule::Product ? add(mn[r.a], mn[r.b]) : p;
                break;
            case Rule::Point: a = p = mp[r.a]; break;
            }
            if (a < mn[c]) {
                mn[c] = a;
                changed = true;
            }
            if (p < mp[c]) {
                mp[c] = p;
                changed = true;
            }
        }
    }
    std::string bad;
    for (int c = 0; c < n; ++c)
        if (mn[c] >= kInf) bad += (bad.empty() ? "" : ", ") + s.names[c];
    if (!bad.empty()) throw Error(ErrorCode::UnproductiveClass, "unproductive class(es): " + bad);
    s.min_size = mn;
}

Standardized standardize(const Specification& spec) {
    auto out = std::make_shared<StandardSpec>();
    Builder b(spec, *out);
    b.run();
    analyze(*out);
    Standardized r;
    r.report = validate(*out);
    r.report.introduced_classes = b.introduced;
    r.spec = out;
    return r;
}

StandardizationReport validate(const StandardSpec& s) {
    StandardizationReport rep;
    int n = s.size();
    rep.productive = true;
    rep.is_context_free = !s.has_pointing;
    rep.is_regular = rep.is_context_free;
    for (const auto& r : s.rules) {
        if (r.kind != Rule::Product) continue;
        Rule left = s.rules[r.a].kind;
        if (left != Rule::Atom && left != Rule::Epsilon) rep.is_regular = false;
    }

    struct Edge {
        int to, w;
    };
    std::vector<std::vector<Edge>> g(n);
    for (int c = 0; c < n; ++c) {
        const StdRule& r = s.rules[c];
        switch (r.kind) {
        case Rule::Union: g[c] = {{r.a, 0}, {r.b, 0}}; break;
        case Rule::Product:
        case Rule::UnpointProduct: g[c] = {{r.a, s.min_size[r.b]}, {r.b, s.min_size[r.a]}}; break;
        case Rule::Point: g[c] = {{r.a, 0}}; break;
        default: break;
        }
    }

    // Tarjan, iterative.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<int, size_t>> work{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on[root] = 1;
        while (!work.empty()) {
            auto& [v, i] = work.back();
            if (i < g[v].size()) {
                int w = g[v][i++].to;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = 1;
                    work.push_back({w, 0});
                } else if (on[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<int> cc;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    comp[w] = static_cast<int>(comps.size());
                    cc.push_back(w);
                } while (w != v);
                std::sort(cc.begin(), cc.end());
                comps.push_back(cc);
            }
            int done = v;
            work.pop_back();
            if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
        }
    }

    for (size_t k = 0; k < comps.size(); ++k) {
        const auto& cc = comps[k];
        bool cyclic = cc.size() > 1;
        if (!cyclic)
            for (const auto& e : g[cc[0]]) cyclic = cyclic || e.to == cc[0];
        if (!cyclic) continue;
        std::map<int, long> pot;
        pot[cc[0]] = 0;
        std::vector<int> q{cc[0]};
        long gg = 0;
        for (size_t qi = 0; qi < q.size(); ++qi) {
            int u = q[qi];
            for (const auto& e : g[u]) {
                if (comp[e.to] != static_cast<int>(k)) continue;
                auto it = pot.find(e.to);
                if (it == pot.end()) {
                    pot[e.to] = pot[u] + e.w;
                    q.push_back(e.to);
                } else {
                    gg = std::gcd(gg, std::labs(pot[u] + e.w - it->second));
                }
            }
        }
        rep.scc_decomposition.push_back(cc);
        rep.cycle_gcd_per_scc.push_back(static_cast<int>(gg));
    }
    return rep;
}

std::vector<int> TransferDescription::labels(int i, int j) const {
    std::vector<int> out;
    for (const auto& t : transitions)
        if (t.from == i && t.to == j) out.push_back(t.atom);
    return out;
}

TransferDescription classify_regular(const StandardSpec& s) {
    int n = s.size();
    for (int c = 0; c < n; ++c) {
        const StdRule& r = s.rules[c];
        if (r.kind == Rule::Point || r.kind == Rule::UnpointProduct)
            throw Error(ErrorCode::NotRegular, "class '" + s.names[c] + "' uses pointing");
        if (r.kind == Rule::Product) {
            Rule left = s.rules[r.a].kind;
            if (left != Rule::Atom && left != Rule::Epsilon)
                throw Error(ErrorCode::NotRegular,
                            "class '" + s.names[c] + "' is not right-linear (left factor " + s.names[r.a] + ")");
        }
    }
    // Epsilon moves and labelled moves in the standard form; the final
    // pseudo-class n follows a trailing atom.
    const int fin = n;
    std::vector<std::vector<int>> eps(n + 1);
    std::vector<std::vector<std::pair<int, int>>> lab(n + 1);
    std::vector<char> acc(n + 1, 0);
    acc[fin] = 1;
    for (int c = 0; c < n; ++c) {
        const StdRule& r = s.rules[c];
        switch (r.kind) {
        case Rule::Epsilon: acc[c] = 1; break;
        case Rule::Atom: lab[c].push_back({r.a, fin}); break;
        case Rule::Union: eps[c] = {r.a, r.b}; break;
        case Rule::Product:
            if (s.rules[r.a].kind == Rule::Atom)
                lab[c].push_back({s.rules[r.a].a, r.b});
            else
                eps[c].push_back(r.b);
            break;
        default: break;
        }
    }
    // Number of epsilon paths from c to each class; the epsilon graph is acyclic
    // because same-size cycles are rejected by analyze().
    std::vector<std::map<int, long>> paths(n + 1);
    std::vector<char> ready(n + 1, 0);
    std::function<const std::map<int, long>&(int)> closure = [&](int c) -> const std::map<int, long>& {
        if (ready[c]) return paths[c];
        std::map<int, long> out{{c, 1}};
        for (int d : eps[c])
            for (auto [e, k] : closure(d)) out[e] += k;
        paths[c] = std::move(out);
        ready[c] = 1;
        return paths[c];
    };

    TransferDescription td;
    std::map<int, int> state;
    std::vector<int> work{s.axiom};
    state[s.axiom] = 0;
    td.states.push_back(s.axiom);
    for (size_t wi = 0; wi < work.size(); ++wi) {
        int c = work[wi];
        int from = state[c];
        bool accepting = false;
        for (auto [d, mult] : closure(c)) {
            accepting = accepting || acc[d];
            for (auto [atom, to] : lab[d]) {
                if (!state.count(to)) {
                    state[to] = static_cast<int>(td.states.size());
                    td.states.push_back(to == fin ? -1 : to);
                    work.push_back(to);
                }
                for (long k = 0; k < mult; ++k) td.transitions.push_back({from, state[to], atom});
            }
        }
        if (static_cast<int>(td.accepting.size()) <= from) td.accepting.resize(from + 1, 0);
        td.accepting[from] = accepting;
    }
    td.accepting.resize(td.states.size(), 0);
    td.initial = 0;
    if (state.count(fin)) td.final_state = state[fin];
    return td;
}

std::string describe_rule(const StandardSpec& s, int c) {
    const StdRule& r = s.rules[c];
    switch (r.kind) {
    case Rule::Epsilon: return "_";
    case Rule::Atom: return s.atoms[r.a].name;
    case Rule::Union: return s.names[r.a] + " | " + s.names[r.b];
    case Rule::Product: return s.names[r.a] + " x " + s.names[r.b];
    case Rule::Point: return "POINT(" + s.names[r.a] + ")";
    case Rule::UnpointProduct: return "UNPOINT(" + s.names[r.a] + " x " + s.names[r.b] + ")";
    }
    return "?";
}

std::string spec_fingerprint(const StandardSpec& s) {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const std::string& t) {
        for (unsigned char ch : t) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    for (const auto& a : s.atoms) mix("atom " + a.name);
    for (int c = 0; c < s.size(); ++c) mix(s.names[c] + " = " + describe_rule(s, c));
    mix("axiom " + s.names[s.axiom]);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace freqgen

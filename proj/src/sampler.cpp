#include "freqgen/sampler.hpp"
#include "freqgen/error.hpp"

namespace freqgen {

std::vector<int> DerivationTree::atom_counts() const {
    std::vector<int> c(spec ? spec->atoms.size() : 0, 0);
    for (int a : word) ++c[a];
    return c;
}

namespace {

void check_request(const CountTable& t, int cls, int n) {
    if (cls < 0 || cls >= t.spec->size()) throw Error(ErrorCode::UnknownClass, "unknown class");
    if (n < 0 || n > t.n_max)
        throw Error(ErrorCode::SizeOutOfRange,
                    "size " + std::to_string(n) + " outside table range 0.." + std::to_string(t.n_max));
    if (sgn(t.num[cls][n]) == 0)
        throw Error(ErrorCode::EmptyClassAtSize,
                    "class '" + t.spec->names[cls] + "' has no structure of size " + std::to_string(n));
}

DerivationTree start_tree(const CountTable& t, int cls, int n, bool trace) {
    DerivationTree d;
    d.spec = t.spec;
    d.root_class = cls;
    d.size = n;
    d.word.assign(n, -1);
    d.has_trace = trace;
    d.trace_probability = 1;
    TreeNode root;
    root.cls = cls;
    root.size = n;
    d.nodes.push_back(root);
    return d;
}

int add_child(DerivationTree& d, int cls, int size, int start) {
    TreeNode c;
    c.cls = cls;
    c.size = size;
    c.start = start;
    d.nodes.push_back(c);
    return static_cast<int>(d.nodes.size()) - 1;
}

void scale_trace(DerivationTree& d, const mpz_class& num, const mpz_class& den) {
    if (!d.has_trace) return;
    mpq_class f(num, den);
    f.canonicalize();
    d.trace_probability *= f;
}

// Term of split k for the product-like rule of class c at size n.
void split_term(const CountTable& t, const StdRule& r, int n, int k, mpz_class& out) {
    const mpz_class& x = t.num[r.a][k];
    const mpz_class& y = t.num[r.b][n - k];
    if (sgn(x) == 0 || sgn(y) == 0) {
        out = 0;
        return;
    }
    mpz_mul(out.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    if (!t.integral_scale()) out *= t.split_factor(n, k);
}

}  // namespace

DerivationTree sample_one(const CountTable& t, int cls, int n, RandomSource& rng, const SampleOptions& opt,
                          SampleStats* stats) {
    check_request(t, cls, n);
    const StandardSpec& s = *t.spec;
    DerivationTree d = start_tree(t, cls, n, opt.trace);
    std::vector<int> todo{0};
    mpz_class x, term, total;
    uint64_t cmp = 0;
    while (!todo.empty()) {
        int id = todo.back();
        todo.pop_back();
        const int c = d.nodes[id].cls, m = d.nodes[id].size, start = d.nodes[id].start;
        const StdRule& r = s.rules[c];
        switch (r.kind) {
        case Rule::Epsilon: break;
        case Rule::Atom:
            d.word[start] = r.a;
            d.nodes[id].choice = r.a;
            break;
        case Rule::Union: {
            x = rng.below(t.num[c][m]);
            int side = x < t.num[r.a][m] ? 0 : 1;
            int child = side == 0 ? r.a : r.b;
            scale_trace(d, t.num[child][m], t.num[c][m]);
            int k = add_child(d, child, m, start);
            d.nodes[id].choice = side;
            d.nodes[id].left = k;
            todo.push_back(k);
            break;
        }
        case Rule::Product:
        case Rule::UnpointProduct: {
            if (r.kind == Rule::Product)
                total = t.num[c][m];
            else
                total = t.num[c][m] * m;
            x = rng.below(total);
            int split = -1;
            for (int i = 0; i <= m; ++i) {
                int k = boustrophedon(i, m);
                ++cmp;
                split_term(t, r, m, k, term);
                if (sgn(term) == 0) continue;
                if (x < term) {
                    split = k;
                    break;
                }
                x -= term;
            }
            if (split < 0) throw Error(ErrorCode::EmptyClassAtSize, "inconsistent count table");
            scale_trace(d, term, total);
            int L = add_child(d, r.a, split, start);
            int R = add_child(d, r.b, m - split, start + split);
            d.nodes[id].choice = split;
            d.nodes[id].left = L;
            d.nodes[id].right = R;
            todo.push_back(R);
            todo.push_back(L);
            break;
        }
        case Rule::Point: {
            int k = add_child(d, r.a, m, start);
            d.nodes[id].left = k;
            d.nodes[id].mark = start + static_cast<int>(rng.below(static_cast<uint64_t>(m)));
            scale_trace(d, mpz_class(1), mpz_class(m));
            todo.push_back(k);
            break;
        }
        }
    }
    if (stats) {
        stats->comparisons += cmp;
        stats->samples += 1;
    }
    return d;
}

std::vector<DerivationTree> sample_many(const CountTable& t, int cls, int n, int m, RandomSource& rng,
                                        const SampleOptions& opt, SampleStats* stats) {
    std::vector<DerivationTree> out;
    if (m <= 0) return out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) out.push_back(sample_one(t, cls, n, rng, opt, stats));
    return out;
}

std::vector<DerivationTree> sample_sharded(const CountTable& t, int cls, int n, int m, uint64_t seed,
                                           int workers, const SampleOptions& opt, SampleStats* stats) {
    if (workers < 1) workers = 1;
    std::vector<DerivationTree> out(m > 0 ? m : 0);
    if (m <= 0) return out;
    check_request(t, cls, n);
    std::vector<SampleStats> st(workers);
#pragma omp parallel for schedule(static, 1)
    for (int w = 0; w < workers; ++w) {
        RandomSource rng(RandomSource::derive(seed, static_cast<uint64_t>(w)));
        for (int i = w; i < m; i += workers) out[i] = sample_one(t, cls, n, rng, opt, &st[w]);
    }
    if (stats)
        for (const auto& s : st) {
            stats->comparisons += s.comparisons;
            stats->samples += s.samples;
        }
    return out;
}

namespace {

void explore(const CountTable& t, DerivationTree d, std::vector<int> todo,
             const std::function<void(const DerivationTree&)>& visit) {
    const StandardSpec& s = *t.spec;
    while (!todo.empty()) {
        int id = todo.back();
        todo.pop_back();
        const int c = d.nodes[id].cls, m = d.nodes[id].size, start = d.nodes[id].start;
        const StdRule& r = s.rules[c];
        switch (r.kind) {
        case Rule::Epsilon: break;
        case Rule::Atom:
            d.word[start] = r.a;
            d.nodes[id].choice = r.a;
            break;
        case Rule::Union: {
            for (int side = 0; side < 2; ++side) {
                int child = side == 0 ? r.a : r.b;
                if (sgn(t.num[child][m]) == 0) continue;
                DerivationTree e = d;
                scale_trace(e, t.num[child][m], t.num[c][m]);
                int k = add_child(e, child, m, start);
                e.nodes[id].choice = side;
                e.nodes[id].left = k;
                auto rest = todo;
                rest.push_back(k);
                explore(t, std::move(e), std::move(rest), visit);
            }
            return;
        }
        case Rule::Product:
        case Rule::UnpointProduct: {
            mpz_class term;
            const mpz_class total = r.kind == Rule::Product ? t.num[c][m] : mpz_class(t.num[c][m] * m);
            for (int i = 0; i <= m; ++i) {
                int k = boustrophedon(i, m);
                split_term(t, r, m, k, term);
                if (sgn(term) == 0) continue;
                DerivationTree e = d;
                scale_trace(e, term, total);
                int L = add_child(e, r.a, k, start);
                int R = add_child(e, r.b, m - k, start + k);
                e.nodes[id].choice = k;
                e.nodes[id].left = L;
                e.nodes[id].right = R;
                auto rest = todo;
                rest.push_back(R);
                rest.push_back(L);
                explore(t, std::move(e), std::move(rest), visit);
            }
            return;
        }
        case Rule::Point: {
            for (int p = 0; p < m; ++p) {
                DerivationTree e = d;
                int k = add_child(e, r.a, m, start);
                e.nodes[id].left = k;
                e.nodes[id].mark = start + p;
                scale_trace(e, mpz_class(1), mpz_class(m));
                auto rest = todo;
                rest.push_back(k);
                explore(t, std::move(e), std::move(rest), visit);
            }
            return;
        }
        }
    }
    visit(d);
}

}  // namespace

void enumerate_derivations(const CountTable& t, int cls, int n,
                           const std::function<void(const DerivationTree&)>& visit) {
    check_request(t, cls, n);
    explore(t, start_tree(t, cls, n, true), {0}, visit);
}

std::string render_word(const DerivationTree& d, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < d.word.size(); ++i) {
        if (i && !sep.empty()) out += sep;
        out += d.spec->atoms[d.word[i]].display;
    }
    return out;
}

namespace {

void render_node(const DerivationTree& d, int id, std::string& out) {
    const StandardSpec& s = *d.spec;
    const TreeNode& nd = d.nodes[id];
    const StdRule& r = s.rules[nd.cls];
    bool named = nd.cls < s.source_classes;
    if (named) {
        if (!out.empty() && out.back() != '(') out += ' ';
        out += "(" + s.names[nd.cls];
    }
    if (r.kind == Rule::Atom) {
        if (!out.empty() && out.back() != '(') out += ' ';
        out += s.atoms[r.a].display;
    }
    if (nd.left >= 0) render_node(d, nd.left, out);
    if (nd.right >= 0) render_node(d, nd.right, out);
    if (named) out += ")";
}

}  // namespace

std::string render_tree(const DerivationTree& d) {
    std::string out;
    if (!d.nodes.empty()) render_node(d, 0, out);
    return out;
}

std::string derivation_key(const DerivationTree& d) {
    std::string out;
    std::vector<int> st{0};
    while (!st.empty()) {
        int id = st.back();
        st.pop_back();
        const TreeNode& nd = d.nodes[id];
        out += std::to_string(nd.cls) + ":" + std::to_string(nd.choice) + ":" + std::to_string(nd.mark) + ";";
        if (nd.right >= 0) st.push_back(nd.right);
        if (nd.left >= 0) st.push_back(nd.left);
    }
    return out;
}

}  // namespace freqgen

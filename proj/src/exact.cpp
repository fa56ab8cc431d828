#include "freqgen/exact.hpp"
#include "freqgen/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace freqgen {

int OccurrenceVector::size() const {
    int n = r;
    for (int x : j) n += x;
    return n;
}

size_t ExactTable::index(const OccurrenceVector& v) const {
    if (static_cast<int>(v.j.size()) != k()) throw Error(ErrorCode::InvalidTarget, "occurrence vector has wrong length");
    size_t idx = 0;
    for (int d = 0; d < k(); ++d) {
        if (v.j[d] < 0 || v.j[d] >= extent[d]) throw Error(ErrorCode::SizeOutOfRange, "occurrence outside table");
        idx += stride[d] * v.j[d];
    }
    if (v.r < 0 || v.r >= extent[k()]) throw Error(ErrorCode::SizeOutOfRange, "occurrence outside table");
    return idx + stride[k()] * v.r;
}

OccurrenceVector ExactTable::vector_at(size_t cell) const {
    OccurrenceVector v;
    v.j.resize(k());
    for (int d = 0; d < k(); ++d) v.j[d] = static_cast<int>(cell / stride[d] % extent[d]);
    v.r = static_cast<int>(cell / stride[k()] % extent[k()]);
    return v;
}

int ExactTable::total(size_t cell) const {
    int n = 0;
    for (int d = 0; d <= k(); ++d) n += static_cast<int>(cell / stride[d] % extent[d]);
    return n;
}

size_t ExactTable::partial_rank(size_t cell, const std::vector<int>& h, int depth) const {
    size_t rank = 0;
    for (int d = 0; d < depth; ++d) {
        int jd = static_cast<int>(cell / stride[d] % extent[d]);
        rank = rank * (jd + 1) + h[d];
    }
    return rank;
}

namespace {

struct Layout {
    std::vector<int> extent;
    std::vector<size_t> stride;
    size_t cells = 0;
    std::vector<std::vector<size_t>> offset;  // [depth-1][cell], plus the total at [cells]
};

Layout make_layout(const OccurrenceVector& target) {
    Layout L;
    const int k = static_cast<int>(target.j.size());
    for (int x : target.j) L.extent.push_back(x + 1);
    L.extent.push_back(target.r + 1);
    L.stride.assign(k + 1, 1);
    for (int d = k - 1; d >= 0; --d) L.stride[d] = L.stride[d + 1] * L.extent[d + 1];
    L.cells = L.stride[0] * L.extent[0];
    L.offset.assign(k, std::vector<size_t>(L.cells + 1, 0));
    for (int i = 1; i <= k; ++i) {
        auto& off = L.offset[i - 1];
        for (size_t cell = 0; cell < L.cells; ++cell) {
            size_t width = 1;
            for (int d = 0; d < i; ++d) width *= cell / L.stride[d] % L.extent[d] + 1;
            off[cell + 1] = off[cell] + width;
        }
    }
    return L;
}

bool is_fast(const StandardSpec& s, int c, const ExactOptions& opt) {
    const StdRule& r = s.rules[c];
    if (!opt.fast_path || r.kind != Rule::Product) return false;
    Rule left = s.rules[r.a].kind;
    return left == Rule::Atom || left == Rule::Epsilon;
}

bool needs_partial(const StandardSpec& s, int c, int k, const ExactOptions& opt) {
    Rule kind = s.rules[c].kind;
    return k > 0 && ((kind == Rule::Product && !is_fast(s, c, opt)) || kind == Rule::UnpointProduct);
}

void check_atoms(const StandardSpec& s, const std::vector<int>& atoms, const OccurrenceVector& target) {
    if (atoms.size() != target.j.size())
        throw Error(ErrorCode::InvalidTarget, "one occurrence count is needed per distinguished atom");
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i] < 0 || atoms[i] >= static_cast<int>(s.atoms.size()))
            throw Error(ErrorCode::UnknownAtom, "unknown atom");
        for (size_t j = 0; j < i; ++j)
            if (atoms[j] == atoms[i]) throw Error(ErrorCode::InvalidTarget, "atom listed twice: " + s.atoms[atoms[i]].name);
        if (target.j[i] < 0) throw Error(ErrorCode::InvalidTarget, "negative occurrence count");
    }
    if (target.r < 0) throw Error(ErrorCode::InvalidTarget, "occurrence counts exceed the size");
}

std::optional<uint64_t> env_budget() {
    const char* v = std::getenv("FREQGEN_TABLE_MEMORY");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    unsigned long long b = std::strtoull(v, &end, 10);
    if (*end != '\0') throw Error(ErrorCode::InvalidTarget, "FREQGEN_TABLE_MEMORY must be a decimal byte count");
    return b;
}

// Rough size of one stored big integer: the handle plus a few limbs.
constexpr uint64_t kBytesPerNumber = 32;

}  // namespace

uint64_t predicted_table_bytes(const StandardSpec& s, const std::vector<int>& atoms, const OccurrenceVector& target,
                               const ExactOptions& opt) {
    check_atoms(s, atoms, target);
    Layout L = make_layout(target);
    const int k = static_cast<int>(atoms.size());
    uint64_t numbers = static_cast<uint64_t>(L.cells) * s.size();
    for (int c = 0; c < s.size(); ++c)
        if (needs_partial(s, c, k, opt))
            for (int i = 1; i <= k; ++i) numbers += L.offset[i - 1][L.cells];
    return numbers * kBytesPerNumber;
}

ExactTable build_exact_table(std::shared_ptr<const StandardSpec> spec, const std::vector<int>& atoms,
                             const OccurrenceVector& target, const ExactOptions& opt) {
    const StandardSpec& s = *spec;
    check_atoms(s, atoms, target);
    std::optional<uint64_t> budget = opt.memory_budget ? opt.memory_budget : env_budget();
    uint64_t need = predicted_table_bytes(s, atoms, target, opt);
    if (budget && need > *budget)
        throw Error(ErrorCode::BudgetExceeded, "exact table needs about " + std::to_string(need) +
                                                   " bytes, budget is " + std::to_string(*budget));

    ExactTable t;
    t.spec = spec;
    t.atoms = atoms;
    t.target = target;
    Layout L = make_layout(target);
    t.extent = L.extent;
    t.stride = L.stride;
    t.cells = L.cells;
    t.offset = std::move(L.offset);
    const int k = t.k();
    t.dim_of_atom.assign(s.atoms.size(), k);
    for (int i = 0; i < k; ++i) t.dim_of_atom[atoms[i]] = i;

    const int nc = s.size();
    t.c.assign(nc, std::vector<mpz_class>(t.cells));
    t.fast.assign(nc, 0);
    t.has_partial.assign(nc, 0);
    t.partial.assign(nc, {});
    for (int c = 0; c < nc; ++c) {
        t.fast[c] = is_fast(s, c, opt);
        t.has_partial[c] = needs_partial(s, c, k, opt);
        if (t.has_partial[c]) {
            t.partial[c].resize(k);
            for (int i = 1; i <= k; ++i) t.partial[c][i - 1].resize(t.offset[i - 1][t.cells]);
        }
    }

    const int n_max = target.size();
    const int cap = opt.max_total >= 0 ? std::min(opt.max_total, n_max) : n_max;
    std::vector<std::vector<size_t>> by_total(n_max + 1);
    for (size_t cell = 0; cell < t.cells; ++cell) {
        int n = t.total(cell);
        if (n <= cap) by_total[n].push_back(cell);
    }

    std::vector<int> jv(k + 1), h(k + 1);
    mpz_class term, raw;
    for (int n = 0; n <= cap; ++n) {
        const std::vector<int>& order = n == 0 ? s.zero_order : s.pos_order;
        for (size_t cell : by_total[n]) {
            for (int d = 0; d <= k; ++d) jv[d] = static_cast<int>(cell / t.stride[d] % t.extent[d]);
            for (int c : order) {
                const StdRule& r = s.rules[c];
                mpz_class& out = t.c[c][cell];
                switch (r.kind) {
                case Rule::Epsilon: out = n == 0 ? 1 : 0; break;
                case Rule::Atom: {
                    int d = t.dim_of_atom[r.a];
                    out = (n == 1 && jv[d] == 1) ? 1 : 0;
                    break;
                }
                case Rule::Union: out = t.c[r.a][cell] + t.c[r.b][cell]; break;
                case Rule::Point: out = n * t.c[r.a][cell]; break;
                case Rule::Product:
                case Rule::UnpointProduct: {
                    if (t.fast[c]) {
                        const StdRule& left = s.rules[r.a];
                        if (left.kind == Rule::Epsilon) {
                            out = t.c[r.b][cell];
                        } else {
                            int d = t.dim_of_atom[left.a];
                            out = jv[d] >= 1 ? t.c[r.b][cell - t.stride[d]] : mpz_class(0);
                        }
                        break;
                    }
                    const auto& A = t.c[r.a];
                    const auto& B = t.c[r.b];
                    raw = 0;
                    if (k == 0) {
                        for (int rp = 0; rp <= jv[0]; ++rp) {
                            size_t hi = t.stride[0] * rp;
                            if (sgn(A[hi]) == 0 || sgn(B[cell - hi]) == 0) continue;
                            mpz_addmul(raw.get_mpz_t(), A[hi].get_mpz_t(), B[cell - hi].get_mpz_t());
                            ++t.multiplications;
                        }
                    } else {
                        // Deepest partial sums first: one entry per prefix (h_1..h_k), summed over r'.
                        auto& deep = t.partial[c][k - 1];
                        size_t base = t.offset[k - 1][cell];
                        std::fill(h.begin(), h.end(), 0);
                        for (size_t rank = 0;; ++rank) {
                            size_t hidx = 0;
                            for (int d = 0; d < k; ++d) hidx += t.stride[d] * h[d];
                            mpz_class& acc = deep[base + rank];
                            acc = 0;
                            for (int rp = 0; rp <= jv[k]; ++rp) {
                                size_t hi = hidx + t.stride[k] * rp;
                                if (sgn(A[hi]) == 0 || sgn(B[cell - hi]) == 0) continue;
                                mpz_addmul(acc.get_mpz_t(), A[hi].get_mpz_t(), B[cell - hi].get_mpz_t());
                                ++t.multiplications;
                            }
                            int d = k - 1;
                            while (d >= 0 && h[d] == jv[d]) h[d--] = 0;
                            if (d < 0) break;
                            ++h[d];
                        }
                        for (int i = k - 1; i >= 1; --i) {
                            auto& up = t.partial[c][i - 1];
                            const auto& down = t.partial[c][i];
                            size_t ub = t.offset[i - 1][cell], db = t.offset[i][cell];
                            size_t width = t.offset[i - 1][cell + 1] - ub;
                            for (size_t p = 0; p < width; ++p) {
                                mpz_class& acc = up[ub + p];
                                acc = 0;
                                for (int hi = 0; hi <= jv[i]; ++hi) acc += down[db + p * (jv[i] + 1) + hi];
                            }
                        }
                        const auto& top = t.partial[c][0];
                        size_t tb = t.offset[0][cell];
                        for (int h1 = 0; h1 <= jv[0]; ++h1) raw += top[tb + h1];
                    }
                    if (r.kind == Rule::Product) {
                        out = raw;
                    } else if (n == 0) {
                        out = 0;
                    } else {
                        if (!mpz_divisible_ui_p(raw.get_mpz_t(), static_cast<unsigned long>(n)))
                            throw Error(ErrorCode::DomainError, "unpointing of class '" + s.names[c] +
                                                                    "' is not integral at size " + std::to_string(n));
                        mpz_divexact_ui(out.get_mpz_t(), raw.get_mpz_t(), static_cast<unsigned long>(n));
                    }
                    break;
                }
                }
            }
        }
    }
    return t;
}

mpz_class fiber_count(const ExactTable& t) {
    if (t.target.r < 0) return 0;
    return t.c[t.spec->axiom][t.index(t.target)];
}

namespace {

void scale(DerivationTree& d, const mpz_class& num, const mpz_class& den) {
    if (!d.has_trace) return;
    mpq_class f(num, den);
    f.canonicalize();
    d.trace_probability *= f;
}

}  // namespace

DerivationTree exact_sample(const ExactTable& t, RandomSource& rng, const SampleOptions& opt, SampleStats* stats) {
    const StandardSpec& s = *t.spec;
    const size_t root = t.index(t.target);
    if (sgn(t.c[s.axiom][root]) == 0) throw Error(ErrorCode::EmptyFiber, "no structure has these occurrence counts");
    const int k = t.k();
    const int n = t.target.size();

    DerivationTree d;
    d.spec = t.spec;
    d.root_class = s.axiom;
    d.size = n;
    d.word.assign(n, -1);
    d.has_trace = opt.trace;
    d.trace_probability = 1;
    std::vector<size_t> cell_of;
    auto add = [&](int cls, size_t cell, int start) {
        TreeNode nd;
        nd.cls = cls;
        nd.size = t.total(cell);
        nd.start = start;
        d.nodes.push_back(nd);
        cell_of.push_back(cell);
        return static_cast<int>(d.nodes.size()) - 1;
    };
    add(s.axiom, root, 0);

    std::vector<int> todo{0}, jv(k + 1), h(k + 1);
    mpz_class x, total, term;
    uint64_t cmp = 0;
    while (!todo.empty()) {
        int id = todo.back();
        todo.pop_back();
        const int c = d.nodes[id].cls, m = d.nodes[id].size, start = d.nodes[id].start;
        const size_t cell = cell_of[id];
        const StdRule& r = s.rules[c];
        switch (r.kind) {
        case Rule::Epsilon: break;
        case Rule::Atom:
            d.word[start] = r.a;
            d.nodes[id].choice = r.a;
            break;
        case Rule::Union: {
            x = rng.below(t.c[c][cell]);
            int side = x < t.c[r.a][cell] ? 0 : 1;
            int child = side == 0 ? r.a : r.b;
            scale(d, t.c[child][cell], t.c[c][cell]);
            int kid = add(child, cell, start);
            d.nodes[id].choice = side;
            d.nodes[id].left = kid;
            todo.push_back(kid);
            break;
        }
        case Rule::Point: {
            int kid = add(r.a, cell, start);
            d.nodes[id].left = kid;
            d.nodes[id].mark = start + static_cast<int>(rng.below(static_cast<uint64_t>(m)));
            scale(d, mpz_class(1), mpz_class(m));
            todo.push_back(kid);
            break;
        }
        case Rule::Product:
        case Rule::UnpointProduct: {
            size_t hidx = 0;
            if (t.fast[c]) {
                const StdRule& left = s.rules[r.a];
                if (left.kind == Rule::Atom) hidx = t.stride[t.dim_of_atom[left.a]];
            } else {
                for (int dd = 0; dd <= k; ++dd) jv[dd] = static_cast<int>(cell / t.stride[dd] % t.extent[dd]);
                total = r.kind == Rule::Product ? t.c[c][cell] : mpz_class(t.c[c][cell] * m);
                x = rng.below(total);
                mpz_class prev = total;
                size_t rank = 0;
                // One atom dimension at a time, each scanned from both ends inward.
                for (int i = 0; i < k; ++i) {
                    const auto& part = t.partial[c][i];
                    size_t base = t.offset[i][cell] + rank * (jv[i] + 1);
                    int pick = -1;
                    for (int q = 0; q <= jv[i]; ++q) {
                        int hi = boustrophedon(q, jv[i]);
                        ++cmp;
                        const mpz_class& v = part[base + hi];
                        if (sgn(v) == 0) continue;
                        if (x < v) {
                            pick = hi;
                            break;
                        }
                        x -= v;
                    }
                    if (pick < 0) throw Error(ErrorCode::EmptyFiber, "inconsistent exact table");
                    h[i] = pick;
                    rank = rank * (jv[i] + 1) + pick;
                    scale(d, part[base + pick], prev);
                    prev = part[base + pick];
                    hidx += t.stride[i] * pick;
                }
                int pick = -1;
                for (int q = 0; q <= jv[k]; ++q) {
                    int rp = boustrophedon(q, jv[k]);
                    ++cmp;
                    size_t hi = hidx + t.stride[k] * rp;
                    const mpz_class& a = t.c[r.a][hi];
                    const mpz_class& b = t.c[r.b][cell - hi];
                    if (sgn(a) == 0 || sgn(b) == 0) continue;
                    term = a * b;
                    if (x < term) {
                        pick = rp;
                        break;
                    }
                    x -= term;
                }
                if (pick < 0) throw Error(ErrorCode::EmptyFiber, "inconsistent exact table");
                hidx += t.stride[k] * pick;
                scale(d, term, prev);
            }
            int L = add(r.a, hidx, start);
            int R = add(r.b, cell - hidx, start + d.nodes[L].size);
            d.nodes[id].choice = d.nodes[L].size;
            d.nodes[id].left = L;
            d.nodes[id].right = R;
            todo.push_back(R);
            todo.push_back(L);
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

OccurrenceVector parse_occurrences(const StandardSpec& s, const std::string& text, int n, std::vector<int>& atoms) {
    std::vector<std::pair<int, int>> given;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidTarget, "expected atom=count, got '" + item + "'");
        std::string name = item.substr(0, eq);
        int a = s.find_atom(name);
        if (a < 0) throw Error(ErrorCode::UnknownAtom, "unknown atom '" + name + "'");
        int cnt;
        try {
            size_t used = 0;
            cnt = std::stoi(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidTarget, "bad occurrence count in '" + item + "'");
        }
        given.push_back({a, cnt});
    }
    // Dimensions follow the declaration order of distinguished atoms, then atom order.
    auto rank = [&](int a) {
        auto it = std::find(s.distinguished.begin(), s.distinguished.end(), a);
        return it != s.distinguished.end() ? static_cast<long>(it - s.distinguished.begin())
                                           : static_cast<long>(s.distinguished.size()) + a;
    };
    std::stable_sort(given.begin(), given.end(), [&](auto& x, auto& y) { return rank(x.first) < rank(y.first); });
    OccurrenceVector v;
    atoms.clear();
    int sum = 0;
    for (auto [a, cnt] : given) {
        atoms.push_back(a);
        v.j.push_back(cnt);
        sum += cnt;
    }
    v.r = n - sum;
    if (v.r < 0) throw Error(ErrorCode::InvalidTarget, "occurrence counts exceed the size");
    return v;
}

}  // namespace freqgen

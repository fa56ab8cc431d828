#include "freqgen/freq.hpp"
#include "freqgen/error.hpp"

#include <cmath>

namespace freqgen {

mpq_class OccurrenceTable::value(int c, int n, int m) const {
    mpz_class den;
    mpz_pow_ui(den.get_mpz_t(), D.get_mpz_t(), static_cast<unsigned long>(n));
    mpq_class q(num[c][n][m], den * E[n]);
    q.canonicalize();
    return q;
}

mpq_class OccurrenceTable::total(int c, int n) const {
    mpz_class s = 0;
    for (const auto& x : num[c][n]) s += x;
    mpz_class den;
    mpz_pow_ui(den.get_mpz_t(), D.get_mpz_t(), static_cast<unsigned long>(n));
    mpq_class q(s, den * E[n]);
    q.canonicalize();
    return q;
}

mpq_class OccurrenceTable::expected(int c, int n) const {
    mpz_class s = 0, sm = 0;
    for (size_t m = 0; m < num[c][n].size(); ++m) {
        s += num[c][n][m];
        sm += num[c][n][m] * static_cast<unsigned long>(m);
    }
    if (s == 0)
        throw Error(ErrorCode::EmptyClassAtSize,
                    "class '" + spec->names[c] + "' has no structure of size " + std::to_string(n));
    mpq_class q(sm, s);
    q.canonicalize();
    return q;
}

namespace {

bool all_zero(const std::vector<mpz_class>& v) {
    for (const auto& x : v)
        if (sgn(x) != 0) return false;
    return true;
}

void poly_conv(const std::vector<mpz_class>& A, const std::vector<mpz_class>& B, const mpz_class* fac,
               std::vector<mpz_class>& out, mpz_class& tmp) {
    for (size_t i = 0; i < A.size(); ++i) {
        if (sgn(A[i]) == 0) continue;
        for (size_t j = 0; j < B.size(); ++j) {
            if (sgn(B[j]) == 0) continue;
            if (fac) {
                mpz_mul(tmp.get_mpz_t(), A[i].get_mpz_t(), B[j].get_mpz_t());
                mpz_addmul(out[i + j].get_mpz_t(), tmp.get_mpz_t(), fac->get_mpz_t());
            } else {
                mpz_addmul(out[i + j].get_mpz_t(), A[i].get_mpz_t(), B[j].get_mpz_t());
            }
        }
    }
}

}  // namespace

OccurrenceTable build_occurrence_table(std::shared_ptr<const StandardSpec> spec, const Weights& w, int atom,
                                       int n_max) {
    if (n_max < 0) throw Error(ErrorCode::SizeOutOfRange, "negative size");
    const StandardSpec& s = *spec;
    OccurrenceTable t;
    t.spec = spec;
    t.atom = atom;
    t.n_max = n_max;
    for (const auto& [a, v] : w.entries) mpz_lcm(t.D.get_mpz_t(), t.D.get_mpz_t(), v.get_den_mpz_t());
    std::vector<mpz_class> wa(s.atoms.size(), t.D);
    for (const auto& [a, v] : w.entries) wa[a] = v.get_num() * (t.D / v.get_den());
    t.E.assign(n_max + 1, 1);
    t.num.assign(s.size(), {});
    for (auto& row : t.num) {
        row.resize(n_max + 1);
        for (int n = 0; n <= n_max; ++n) row[n].assign(n + 1, 0);
    }
    const bool general = s.has_unpoint;
    std::vector<mpz_class> fac;
    std::vector<int> done;
    std::vector<std::vector<char>> nz(s.size(), std::vector<char>(n_max + 1, 0));
    mpz_class tmp;

    for (int n = 0; n <= n_max; ++n) {
        if (general && n > 0) {
            mpz_class e = 1;
            for (int k = 1; k < n; ++k) {
                mpz_class p = t.E[k] * t.E[n - k];
                mpz_lcm(e.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
            }
            t.E[n] = e;
            fac.assign(n + 1, 1);
            for (int k = 0; k <= n; ++k) fac[k] = e / (t.E[k] * t.E[n - k]);
        }
        done.clear();
        for (int c : n == 0 ? s.zero_order : s.pos_order) {
            const StdRule& r = s.rules[c];
            std::vector<mpz_class>& out = t.num[c][n];
            switch (r.kind) {
            case Rule::Epsilon:
                if (n == 0) out[0] = 1;
                break;
            case Rule::Atom:
                if (n == 1) out[r.a == atom ? 1 : 0] = wa[r.a] * t.E[1];
                break;
            case Rule::Union:
                for (int m = 0; m <= n; ++m) out[m] = t.num[r.a][n][m] + t.num[r.b][n][m];
                break;
            case Rule::Product:
            case Rule::UnpointProduct: {
                if (r.kind == Rule::UnpointProduct && n == 0) break;
                for (int k = 0; k <= n; ++k) {
                    if (!nz[r.a][k] || !nz[r.b][n - k]) continue;
                    poly_conv(t.num[r.a][k], t.num[r.b][n - k], general ? &fac[k] : nullptr, out, tmp);
                }
                if (r.kind == Rule::UnpointProduct) {
                    mpz_class g = 1;
                    for (auto& x : out) {
                        mpz_class need = n / gcd(x, mpz_class(n));
                        mpz_lcm(g.get_mpz_t(), g.get_mpz_t(), need.get_mpz_t());
                    }
                    if (g != 1) {
                        t.E[n] *= g;
                        for (auto& f : fac) f *= g;
                        for (int d : done)
                            for (auto& x : t.num[d][n]) x *= g;
                        for (auto& x : out) x *= g;
                    }
                    for (auto& x : out) mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(n));
                }
                break;
            }
            case Rule::Point:
                for (int m = 0; m <= n; ++m) out[m] = n * t.num[r.a][n][m];
                break;
            }
            nz[c][n] = !all_zero(out);
            done.push_back(c);
        }
    }
    return t;
}

mpq_class freq_dp(std::shared_ptr<const StandardSpec> spec, const Weights& w, int atom, int n) {
    if (n < 0) throw Error(ErrorCode::SizeOutOfRange, "negative size");
    OccurrenceTable t = build_occurrence_table(spec, w, atom, n);
    return t.expected(spec->axiom, n);
}

int PointedSpec::companion(int atom, int cls) const {
    for (size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i] == atom) return pointed[i][cls];
    throw Error(ErrorCode::UnknownAtom, "atom was not pointed");
}

namespace {

class PointBuilder {
public:
    PointBuilder(StandardSpec& out, int base, int atom) : s_(out), base_(base), atom_(atom) {
        has_.assign(base, 0);
        for (bool changed = true; changed;) {
            changed = false;
            for (int c = 0; c < base; ++c) {
                if (has_[c]) continue;
                const StdRule& r = s_.rules[c];
                bool v = false;
                switch (r.kind) {
                case Rule::Atom: v = r.a == atom; break;
                case Rule::Union:
                case Rule::Product: v = has_[r.a] || has_[r.b]; break;
                default: break;
                }
                if (v) {
                    has_[c] = 1;
                    changed = true;
                }
            }
        }
        memo_.assign(base, -3);
    }

    int comp(int c) {
        if (!has_[c]) return -1;
        if (memo_[c] >= 0) return memo_[c];
        const StdRule r = s_.rules[c];
        switch (r.kind) {
        case Rule::Atom: return memo_[c] = c;
        case Rule::Union: {
            if (has_[r.a] && has_[r.b]) {
                int id = fresh(c, "");
                int x = comp(r.a), y = comp(r.b);
                s_.rules[id] = {Rule::Union, x, y};
                return id;
            }
            // Follow one-sided unions down to a class with a real companion.
            // A cycle here would be a same-size union cycle, which analyze() rejects.
            int d = c;
            for (int steps = 0; s_.rules[d].kind == Rule::Union && !(has_[s_.rules[d].a] && has_[s_.rules[d].b]);
                 ++steps) {
                if (steps > base_) throw Error(ErrorCode::EpsilonCycle, "cyclic alias while pointing");
                d = has_[s_.rules[d].a] ? s_.rules[d].a : s_.rules[d].b;
            }
            int id = comp(d);
            return memo_[c] = id;
        }
        case Rule::Product: {
            bool left = has_[r.a], right = has_[r.b];
            if (left && right) {
                int id = fresh(c, "");
                int p = fresh(c, ".l");
                int q = fresh(c, ".r");
                s_.rules[id] = {Rule::Union, p, q};
                int x = comp(r.a);
                s_.rules[p] = {Rule::Product, x, r.b};
                int y = comp(r.b);
                s_.rules[q] = {Rule::Product, r.a, y};
                return id;
            }
            int id = fresh(c, "");
            if (left) {
                int x = comp(r.a);
                s_.rules[id] = {Rule::Product, x, r.b};
            } else {
                int y = comp(r.b);
                s_.rules[id] = {Rule::Product, r.a, y};
            }
            return id;
        }
        default: return -1;
        }
    }

private:
    int fresh(int c, const std::string& suffix) {
        s_.names.push_back(s_.names[c] + "^" + s_.atoms[atom_].name + suffix);
        s_.rules.push_back({});
        s_.provenance.push_back("pointed at " + s_.atoms[atom_].name);
        int id = static_cast<int>(s_.rules.size()) - 1;
        if (suffix.empty()) memo_[c] = id;
        return id;
    }

    StandardSpec& s_;
    int base_;
    int atom_;
    std::vector<char> has_;
    std::vector<int> memo_;
};

}  // namespace

PointedSpec point_spec(const StandardSpec& s, const std::vector<int>& atoms) {
    if (s.has_pointing)
        throw Error(ErrorCode::NotContextFree, "partial pointing requires a specification without pointing rules");
    auto out = std::make_shared<StandardSpec>(s);
    PointedSpec ps;
    ps.atoms = atoms;
    int base = s.size();
    for (int a : atoms) {
        if (a < 0 || a >= static_cast<int>(s.atoms.size())) throw Error(ErrorCode::UnknownAtom, "unknown atom");
        PointBuilder b(*out, base, a);
        std::vector<int> row(base, -1);
        for (int c = 0; c < base; ++c) row[c] = b.comp(c);
        ps.pointed.push_back(row);
    }
    analyze(*out);
    ps.spec = out;
    return ps;
}

PointedSpec point_spec(const StandardSpec& s, int atom) { return point_spec(s, std::vector<int>{atom}); }

mpq_class freq_via_pointing(std::shared_ptr<const StandardSpec> spec, const Weights& w, int atom, int n) {
    if (n < 0) throw Error(ErrorCode::SizeOutOfRange, "negative size");
    PointedSpec ps = point_spec(*spec, atom);
    CountTable t = build_count_table(ps.spec, w, n);
    int ax = spec->axiom;
    if (sgn(t.num[ax][n]) == 0)
        throw Error(ErrorCode::EmptyClassAtSize,
                    "class '" + spec->names[ax] + "' has no structure of size " + std::to_string(n));
    int pc = ps.pointed[0][ax];
    if (pc < 0) return 0;
    mpq_class q(t.num[pc][n], t.num[ax][n]);
    q.canonicalize();
    return q;
}

std::map<int, mpq_class> frequency_profile(std::shared_ptr<const StandardSpec> spec, const Weights& w, int n,
                                           std::vector<int> atoms, FreqMethod method) {
    if (n < 1) throw Error(ErrorCode::SizeOutOfRange, "frequency profile needs size >= 1");
    if (atoms.empty())
        for (size_t a = 0; a < spec->atoms.size(); ++a) atoms.push_back(static_cast<int>(a));
    if (method == FreqMethod::Auto) method = spec->has_pointing ? FreqMethod::DP : FreqMethod::Pointing;
    std::map<int, mpq_class> out;
    int ax = spec->axiom;
    if (method == FreqMethod::DP) {
        for (int a : atoms) out[a] = freq_dp(spec, w, a, n) / n;
        return out;
    }
    PointedSpec ps = point_spec(*spec, atoms);
    CountTable t = build_count_table(ps.spec, w, n);
    if (sgn(t.num[ax][n]) == 0)
        throw Error(ErrorCode::EmptyClassAtSize,
                    "class '" + spec->names[ax] + "' has no structure of size " + std::to_string(n));
    for (size_t i = 0; i < atoms.size(); ++i) {
        int pc = ps.pointed[i][ax];
        mpq_class q = 0;
        if (pc >= 0) {
            q = mpq_class(t.num[pc][n], t.num[ax][n] * n);
            q.canonicalize();
        }
        out[atoms[i]] = q;
    }
    return out;
}

ProfileEvaluator::ProfileEvaluator(std::shared_ptr<const StandardSpec> spec, std::vector<int> atoms, int n,
                                   Kernel kernel)
    : spec_(std::move(spec)), atoms_(std::move(atoms)), n_(n), kernel_(kernel) {
    if (n_ < 1) throw Error(ErrorCode::SizeOutOfRange, "frequency profile needs size >= 1");
    pointed_route_ = !spec_->has_pointing;
    if (pointed_route_) ps_ = point_spec(*spec_, atoms_);
}

std::vector<double> ProfileEvaluator::evaluate(const std::vector<double>& weights) const {
    return pointed_route_ ? eval_pointed(weights) : eval_dp(weights);
}

namespace {

constexpr long double kHuge = 1e600L;
constexpr long double kTiny = 1e-600L;

// Multiplies entries of size k by sigma^k for k <= n.
template <class F>
long double rescale_if_needed(long double maxabs, int n, F&& apply) {
    if (n < 1 || maxabs == 0 || (maxabs < kHuge && maxabs > kTiny)) return 1;
    long double sigma = std::pow(maxabs, -1.0L / n);
    apply(sigma);
    return sigma;
}

}  // namespace

std::vector<double> ProfileEvaluator::eval_pointed(const std::vector<double>& weights) const {
    const StandardSpec& s = *ps_.spec;
    int N = n_;
    std::vector<std::vector<long double>> v(s.size(), std::vector<long double>(N + 1, 0.0L));
    std::vector<long double> wa(weights.begin(), weights.end());
    for (int n = 0; n <= N; ++n) {
        for (int c : n == 0 ? s.zero_order : s.pos_order) {
            const StdRule& r = s.rules[c];
            long double& out = v[c][n];
            switch (r.kind) {
            case Rule::Epsilon: out = n == 0 ? 1 : 0; break;
            case Rule::Atom: out = n == 1 ? wa[r.a] : 0; break;
            case Rule::Union: out = v[r.a][n] + v[r.b][n]; break;
            case Rule::Product: out = convolve_at(v[r.a], v[r.b], n, kernel_); break;
            default: out = 0; break;
            }
        }
        long double mx = 0;
        for (int c = 0; c < s.size(); ++c) mx = std::max(mx, std::fabs(v[c][n]));
        rescale_if_needed(mx, n, [&](long double sigma) {
            for (auto& row : v) {
                long double p = 1;
                for (int k = 0; k <= n; ++k) {
                    row[k] *= p;
                    p *= sigma;
                }
            }
            for (auto& x : wa) x *= sigma;
        });
    }
    int ax = spec_->axiom;
    if (!(v[ax][N] > 0))
        throw Error(ErrorCode::EmptyClassAtSize,
                    "class '" + spec_->names[ax] + "' has no structure of size " + std::to_string(N));
    std::vector<double> out;
    for (size_t i = 0; i < atoms_.size(); ++i) {
        int pc = ps_.pointed[i][ax];
        out.push_back(pc < 0 ? 0.0 : static_cast<double>(v[pc][N] / v[ax][N] / N));
    }
    return out;
}

std::vector<double> ProfileEvaluator::eval_dp(const std::vector<double>& weights) const {
    const StandardSpec& s = *spec_;
    int N = n_;
    std::vector<double> out;
    for (int atom : atoms_) {
        std::vector<std::vector<std::vector<long double>>> g(s.size());
        for (auto& row : g) {
            row.resize(N + 1);
            for (int n = 0; n <= N; ++n) row[n].assign(n + 1, 0.0L);
        }
        std::vector<long double> wa(weights.begin(), weights.end());
        for (int n = 0; n <= N; ++n) {
            for (int c : n == 0 ? s.zero_order : s.pos_order) {
                const StdRule& r = s.rules[c];
                auto& o = g[c][n];
                switch (r.kind) {
                case Rule::Epsilon:
                    if (n == 0) o[0] = 1;
                    break;
                case Rule::Atom:
                    if (n == 1) o[r.a == atom ? 1 : 0] = wa[r.a];
                    break;
                case Rule::Union:
                    for (int m = 0; m <= n; ++m) o[m] = g[r.a][n][m] + g[r.b][n][m];
                    break;
                case Rule::Product:
                case Rule::UnpointProduct:
                    if (r.kind == Rule::UnpointProduct && n == 0) break;
                    for (int k = 0; k <= n; ++k) {
                        const auto& A = g[r.a][k];
                        const auto& B = g[r.b][n - k];
                        for (size_t i = 0; i < A.size(); ++i) {
                            if (A[i] == 0) continue;
                            for (size_t j = 0; j < B.size(); ++j) o[i + j] += A[i] * B[j];
                        }
                    }
                    if (r.kind == Rule::UnpointProduct)
                        for (auto& x : o) x /= n;
                    break;
                case Rule::Point:
                    for (int m = 0; m <= n; ++m) o[m] = n * g[r.a][n][m];
                    break;
                }
            }
            long double mx = 0;
            for (int c = 0; c < s.size(); ++c)
                for (long double x : g[c][n]) mx = std::max(mx, std::fabs(x));
            rescale_if_needed(mx, n, [&](long double sigma) {
                for (auto& row : g) {
                    long double p = 1;
                    for (int k = 0; k <= n; ++k) {
                        for (auto& x : row[k]) x *= p;
                        p *= sigma;
                    }
                }
                for (auto& x : wa) x *= sigma;
            });
        }
        const auto& top = g[s.axiom][N];
        long double sum = 0, sm = 0;
        for (size_t m = 0; m < top.size(); ++m) {
            sum += top[m];
            sm += top[m] * m;
        }
        if (!(sum > 0))
            throw Error(ErrorCode::EmptyClassAtSize,
                        "class '" + s.names[s.axiom] + "' has no structure of size " + std::to_string(N));
        out.push_back(static_cast<double>(sm / sum / N));
    }
    return out;
}

}  // namespace freqgen

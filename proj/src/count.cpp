#include "freqgen/count.hpp"
#include "freqgen/error.hpp"

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>

namespace freqgen {

mpq_class Weights::get(int atom) const {
    auto it = entries.find(atom);
    return it == entries.end() ? mpq_class(1) : it->second;
}

void Weights::set(int atom, const mpq_class& w) {
    if (w <= 0) throw Error(ErrorCode::InvalidWeight, "weights must be positive");
    mpq_class v = w;
    v.canonicalize();
    entries[atom] = v;
}

bool Weights::uniform() const {
    for (const auto& [a, w] : entries)
        if (w != 1) return false;
    return true;
}

Weights Weights::from_spec(const Specification& s) {
    Weights w;
    for (const auto& [a, v] : s.weights) w.set(a, v);
    return w;
}

std::string Weights::to_string(const std::vector<AtomInfo>& atoms) const {
    std::string out;
    for (const auto& [a, w] : entries) {
        if (w == 1) continue;
        if (!out.empty()) out += ",";
        out += atoms[a].name + "=" + w.get_str();
    }
    return out;
}

mpz_class CountTable::denominator(int n) const {
    mpz_class d;
    mpz_pow_ui(d.get_mpz_t(), D.get_mpz_t(), static_cast<unsigned long>(n));
    return d * E[n];
}

mpq_class CountTable::value(int c, int n) const {
    mpq_class q(num[c][n], denominator(n));
    q.canonicalize();
    return q;
}

mpz_class CountTable::split_factor(int n, int k) const {
    if (integral_scale()) return 1;
    return E[n] / (E[k] * E[n - k]);
}

std::string table_fingerprint(const StandardSpec& s, const Weights& w) {
    std::string base = spec_fingerprint(s) + "|" + w.to_string(s.atoms);
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : base) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void prepare(CountTable& t, const std::shared_ptr<const StandardSpec>& spec, const Weights& w, int n_max) {
    if (n_max < 0) throw Error(ErrorCode::SizeOutOfRange, "negative size");
    t.spec = spec;
    t.weights = w;
    t.n_max = n_max;
    t.fingerprint = table_fingerprint(*spec, w);
    t.uniform = w.uniform();
    t.D = 1;
    for (const auto& [a, v] : w.entries) mpz_lcm(t.D.get_mpz_t(), t.D.get_mpz_t(), v.get_den_mpz_t());
    t.atom_scaled.assign(spec->atoms.size(), t.D);
    for (const auto& [a, v] : w.entries) t.atom_scaled[a] = v.get_num() * (t.D / v.get_den());
    t.E.assign(n_max + 1, 1);
    t.num.assign(spec->size(), std::vector<mpz_class>(n_max + 1));
}

// E_n = lcm over splits of E_k E_{n-k}; fac[k] = E_n / (E_k E_{n-k}).
void layer_scale(CountTable& t, int n, std::vector<mpz_class>& fac) {
    mpz_class e = 1;
    for (int k = 1; k < n; ++k) {
        mpz_class p = t.E[k] * t.E[n - k];
        mpz_lcm(e.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    }
    t.E[n] = e;
    fac.assign(n + 1, 1);
    for (int k = 0; k <= n; ++k) fac[k] = e / (t.E[k] * t.E[n - k]);
}

}  // namespace

CountTable build_count_table(std::shared_ptr<const StandardSpec> spec, const Weights& w, int n_max,
                             const CountOptions& opt) {
    CountTable t;
    prepare(t, spec, w, n_max);
    const StandardSpec& s = *spec;
    const bool general = s.has_unpoint;
    std::vector<mpz_class> fac;
    std::vector<int> done;

    for (int n = 0; n <= n_max; ++n) {
        const std::vector<int>& order = n == 0 ? s.zero_order : s.pos_order;
        if (general && n > 0) layer_scale(t, n, fac);
        const std::vector<mpz_class>* f = general && n > 0 ? &fac : nullptr;
        done.clear();
        for (int c : order) {
            const StdRule& r = s.rules[c];
            mpz_class& out = t.num[c][n];
            switch (r.kind) {
            case Rule::Epsilon: out = n == 0 ? 1 : 0; break;
            case Rule::Atom: out = n == 1 ? mpz_class(t.atom_scaled[r.a] * t.E[1]) : mpz_class(0); break;
            case Rule::Union: out = t.num[r.a][n] + t.num[r.b][n]; break;
            case Rule::Product: convolve_at(t.num[r.a], t.num[r.b], n, f, out, opt.kernel); break;
            case Rule::Point: out = n * t.num[r.a][n]; break;
            case Rule::UnpointProduct: {
                if (n == 0) {
                    out = 0;
                    break;
                }
                mpz_class sum;
                convolve_at(t.num[r.a], t.num[r.b], n, f, sum, opt.kernel);
                if (!mpz_divisible_ui_p(sum.get_mpz_t(), static_cast<unsigned long>(n))) {
                    mpz_class g = n / gcd(sum, mpz_class(n));
                    t.E[n] *= g;
                    for (auto& x : fac) x *= g;
                    for (int d : done) t.num[d][n] *= g;
                    sum *= g;
                }
                mpz_divexact_ui(out.get_mpz_t(), sum.get_mpz_t(), static_cast<unsigned long>(n));
                break;
            }
            }
            done.push_back(c);
        }
    }
    return t;
}

mpq_class count(const CountTable& t, int cls, int n) {
    if (cls < 0 || cls >= t.spec->size()) throw Error(ErrorCode::UnknownClass, "unknown class");
    if (n < 0 || n > t.n_max)
        throw Error(ErrorCode::SizeOutOfRange,
                    "size " + std::to_string(n) + " outside table range 0.." + std::to_string(t.n_max));
    return t.value(cls, n);
}

mpq_class count(const CountTable& t, const std::string& cls, int n) {
    int c = t.spec->find_class(cls);
    if (c < 0) throw Error(ErrorCode::UnknownClass, "unknown class '" + cls + "'");
    return count(t, c, n);
}

namespace {

void put_u32(std::ostream& o, uint32_t v) {
    for (int i = 0; i < 4; ++i) o.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& o, uint64_t v) {
    for (int i = 0; i < 8; ++i) o.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t get_uint(std::istream& in, int bytes) {
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        int ch = in.get();
        if (ch == EOF) throw Error(ErrorCode::IoError, "truncated table cache");
        v |= static_cast<uint64_t>(static_cast<unsigned char>(ch)) << (8 * i);
    }
    return v;
}

void put_mpz(std::ostream& o, const mpz_class& z) {
    int sg = sgn(z);
    o.put(static_cast<char>(sg == 0 ? 0 : sg > 0 ? 1 : 2));
    size_t count = 0;
    std::vector<unsigned char> buf((mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8 + 1);
    if (sg != 0) mpz_export(buf.data(), &count, -1, 1, -1, 0, z.get_mpz_t());
    put_u64(o, count);
    o.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(count));
}

mpz_class get_mpz(std::istream& in) {
    int sg = static_cast<int>(get_uint(in, 1));
    uint64_t count = get_uint(in, 8);
    if (sg > 2 || count > (1ULL << 34)) throw Error(ErrorCode::IoError, "corrupt table cache");
    std::vector<unsigned char> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count));
    if (static_cast<uint64_t>(in.gcount()) != count) throw Error(ErrorCode::IoError, "truncated table cache");
    mpz_class z = 0;
    if (count) mpz_import(z.get_mpz_t(), count, -1, 1, -1, 0, buf.data());
    if (sg == 2) z = -z;
    return z;
}

}  // namespace

void save_table(const CountTable& t, std::ostream& out) {
    out.write("FQGT", 4);
    put_u32(out, 1);
    put_u64(out, t.fingerprint.size());
    out.write(t.fingerprint.data(), static_cast<std::streamsize>(t.fingerprint.size()));
    put_u32(out, static_cast<uint32_t>(t.n_max));
    put_u32(out, static_cast<uint32_t>(t.num.size()));
    for (size_t c = 0; c < t.num.size(); ++c)
        for (int n = 0; n <= t.n_max; ++n) {
            mpq_class v = t.value(static_cast<int>(c), n);
            put_mpz(out, v.get_num());
            put_mpz(out, v.get_den());
        }
}

CountTable load_table(std::istream& in, std::shared_ptr<const StandardSpec> spec, const Weights& w) {
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != "FQGT") throw Error(ErrorCode::IoError, "not a table cache");
    if (get_uint(in, 4) != 1) throw Error(ErrorCode::IoError, "unsupported table cache version");
    uint64_t flen = get_uint(in, 8);
    if (flen > 1024) throw Error(ErrorCode::IoError, "corrupt table cache");
    std::string fp(flen, '\0');
    in.read(fp.data(), static_cast<std::streamsize>(flen));
    std::string want = table_fingerprint(*spec, w);
    if (fp != want) throw Error(ErrorCode::CacheMismatch, "cache fingerprint " + fp + " does not match " + want);
    int n_max = static_cast<int>(get_uint(in, 4));
    size_t classes = get_uint(in, 4);
    if (classes != static_cast<size_t>(spec->size())) throw Error(ErrorCode::CacheMismatch, "class count differs");

    std::vector<std::vector<mpq_class>> vals(classes, std::vector<mpq_class>(n_max + 1));
    for (size_t c = 0; c < classes; ++c)
        for (int n = 0; n <= n_max; ++n) {
            mpz_class p = get_mpz(in), q = get_mpz(in);
            if (q <= 0) throw Error(ErrorCode::IoError, "corrupt table cache");
            vals[c][n] = mpq_class(p, q);
            vals[c][n].canonicalize();
        }

    CountTable t;
    prepare(t, spec, w, n_max);
    std::vector<mpz_class> fac;
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0 && spec->has_unpoint) layer_scale(t, n, fac);
        mpz_class base;
        mpz_pow_ui(base.get_mpz_t(), t.D.get_mpz_t(), static_cast<unsigned long>(n));
        for (size_t c = 0; c < classes; ++c) {
            mpz_class need = vals[c][n].get_den() / gcd(vals[c][n].get_den(), base * t.E[n]);
            if (need != 1) {
                if (!spec->has_unpoint) throw Error(ErrorCode::CacheMismatch, "cache entry has unexpected denominator");
                t.E[n] *= need;
            }
        }
        mpz_class den = base * t.E[n];
        for (size_t c = 0; c < classes; ++c) {
            mpq_class s = vals[c][n] * den;
            t.num[c][n] = s.get_num();
        }
    }
    return t;
}

}  // namespace freqgen

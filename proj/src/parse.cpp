#include "freqgen/error.hpp"
#include "freqgen/spec.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace freqgen {

namespace {

enum class Tok { Word, Quoted, Arrow, Bar, Semi, LParen, RParen, Eq, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.' ||
           c == '/' || c == '+' || c == '-';
}

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto adv = [&](size_t k) {
        for (size_t j = 0; j < k; ++j) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') adv(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        int l = line, k = col;
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            out.push_back({Tok::Arrow, "->", l, k});
            adv(2);
            continue;
        }
        switch (c) {
        case '|': out.push_back({Tok::Bar, "|", l, k}); adv(1); continue;
        case ';': out.push_back({Tok::Semi, ";", l, k}); adv(1); continue;
        case '(': out.push_back({Tok::LParen, "(", l, k}); adv(1); continue;
        case ')': out.push_back({Tok::RParen, ")", l, k}); adv(1); continue;
        case '=': out.push_back({Tok::Eq, "=", l, k}); adv(1); continue;
        default: break;
        }
        if (c == '"' || c == '\'') {
            size_t j = i + 1;
            while (j < src.size() && src[j] != c && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != c) throw SyntaxError(l, k, "unterminated quoted token");
            std::string text = src.substr(i + 1, j - i - 1);
            if (text.empty()) throw SyntaxError(l, k, "empty quoted token");
            out.push_back({Tok::Quoted, text, l, k});
            adv(j - i + 1);
            continue;
        }
        if (word_char(c)) {
            size_t j = i;
            while (j < src.size() && word_char(src[j])) {
                if (src[j] == '-' && j + 1 < src.size() && src[j + 1] == '>') break;
                ++j;
            }
            out.push_back({Tok::Word, src.substr(i, j - i), l, k});
            adv(j - i);
            continue;
        }
        throw SyntaxError(l, k, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

struct RawItem {
    enum class Kind { Symbol, Quoted, Epsilon, Seq, Point, Unpoint } kind;
    std::string name;
    std::vector<std::vector<RawItem>> alts;
    int line = 0, col = 0;
};

struct RawRule {
    std::string lhs;
    int line, col;
    std::vector<std::vector<RawItem>> alts;
};

struct Decl {
    std::string kind;  // weight, target, display
    std::string name;
    std::string value;
    int line, col;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    void run() {
        while (peek().kind != Tok::End) statement();
    }

    std::vector<RawRule> rules;
    std::vector<Decl> decls;
    std::string axiom;
    int axiom_line = 0, axiom_col = 0;

private:
    const Token& peek(size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
    Token next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }

    [[noreturn]] void fail(const Token& t, const std::string& what) const {
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.line, t.col, "expected " + what + ", found " + got);
    }

    Token expect(Tok k, const std::string& what) {
        if (peek().kind != k) fail(peek(), what);
        return next();
    }

    void statement() {
        const Token& h = peek();
        if (h.kind != Tok::Word) fail(h, "rule or declaration");
        bool keyword = peek(1).kind != Tok::Arrow;
        if (keyword && h.text == "axiom") {
            next();
            Token name = expect(Tok::Word, "class name");
            axiom = name.text;
            axiom_line = name.line;
            axiom_col = name.col;
            expect(Tok::Semi, "';'");
            return;
        }
        if (keyword && (h.text == "weight" || h.text == "target" || h.text == "display")) {
            Token kw = next();
            Token name = peek();
            if (name.kind != Tok::Word && name.kind != Tok::Quoted) fail(name, "atom name");
            next();
            expect(Tok::Eq, "'='");
            Token val = peek();
            if (kw.text == "display") {
                if (val.kind != Tok::Quoted && val.kind != Tok::Word) fail(val, "display symbol");
            } else if (val.kind != Tok::Word) {
                fail(val, "number");
            }
            next();
            expect(Tok::Semi, "';'");
            decls.push_back({kw.text, name.text, val.text, name.line, name.col});
            return;
        }
        Token lhs = next();
        expect(Tok::Arrow, "'->'");
        RawRule r{lhs.text, lhs.line, lhs.col, alternatives()};
        expect(Tok::Semi, "';'");
        rules.push_back(std::move(r));
    }

    std::vector<std::vector<RawItem>> alternatives() {
        std::vector<std::vector<RawItem>> alts;
        alts.push_back(alternative());
        while (peek().kind == Tok::Bar) {
            next();
            alts.push_back(alternative());
        }
        return alts;
    }

    std::vector<RawItem> alternative() {
        std::vector<RawItem> items;
        while (true) {
            const Token& t = peek();
            if (t.kind == Tok::Quoted) {
                next();
                items.push_back({RawItem::Kind::Quoted, t.text, {}, t.line, t.col});
                continue;
            }
            if (t.kind != Tok::Word) break;
            if (t.text == "_") {
                next();
                items.push_back({RawItem::Kind::Epsilon, "_", {}, t.line, t.col});
                continue;
            }
            if (peek(1).kind == Tok::LParen &&
                (t.text == "SEQ" || t.text == "POINT" || t.text == "UNPOINT")) {
                Token kw = next();
                next();
                RawItem it{RawItem::Kind::Seq, kw.text, alternatives(), kw.line, kw.col};
                if (kw.text == "POINT") it.kind = RawItem::Kind::Point;
                if (kw.text == "UNPOINT") it.kind = RawItem::Kind::Unpoint;
                expect(Tok::RParen, "')'");
                items.push_back(std::move(it));
                continue;
            }
            next();
            items.push_back({RawItem::Kind::Symbol, t.text, {}, t.line, t.col});
        }
        if (items.empty()) fail(peek(), "symbol or '_'");
        for (const auto& it : items)
            if (it.kind == RawItem::Kind::Epsilon && items.size() > 1)
                throw SyntaxError(it.line, it.col, "'_' must stand alone in an alternative");
        return items;
    }

    std::vector<Token> t_;
    size_t p_ = 0;
};

class Resolver {
public:
    explicit Resolver(Specification& s) : s_(s) {}

    int atom(const std::string& name) {
        int a = s_.find_atom(name);
        if (a >= 0) return a;
        s_.atoms.push_back({name, name});
        return static_cast<int>(s_.atoms.size()) - 1;
    }

    Expr alts(const std::vector<std::vector<RawItem>>& alts) {
        std::vector<Expr> xs;
        for (const auto& alt : alts) xs.push_back(seq(alt));
        if (xs.size() == 1) return std::move(xs[0]);
        return Expr::node(Expr::Kind::Union, std::move(xs));
    }

private:
    Expr seq(const std::vector<RawItem>& items) {
        std::vector<Expr> xs;
        for (const auto& it : items) xs.push_back(item(it));
        if (xs.size() == 1) return std::move(xs[0]);
        return Expr::node(Expr::Kind::Product, std::move(xs));
    }

    Expr item(const RawItem& it) {
        switch (it.kind) {
        case RawItem::Kind::Epsilon: return Expr::epsilon();
        case RawItem::Kind::Quoted: return Expr::atom(atom(it.name));
        case RawItem::Kind::Symbol: {
            int c = s_.find_class(it.name);
            if (c >= 0) return Expr::ref(c);
            return Expr::atom(atom(it.name));
        }
        case RawItem::Kind::Seq: return Expr::node(Expr::Kind::Sequence, {alts(it.alts)});
        case RawItem::Kind::Point: return Expr::node(Expr::Kind::Point, {alts(it.alts)});
        case RawItem::Kind::Unpoint: return Expr::node(Expr::Kind::Unpoint, {alts(it.alts)});
        }
        return Expr::epsilon();
    }

    Specification& s_;
};

}  // namespace

int Specification::find_class(const std::string& name) const {
    for (size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == name) return static_cast<int>(i);
    return -1;
}

int Specification::find_atom(const std::string& name) const {
    for (size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i].name == name) return static_cast<int>(i);
    return -1;
}

mpq_class parse_rational(const std::string& s) {
    auto bad = [&]() { return Error(ErrorCode::InvalidWeight, "not a number: '" + s + "'"); };
    if (s.empty()) throw bad();
    if (s[0] == '-' || s[0] == '+') {
        mpq_class r = parse_rational(s.substr(1));
        return s[0] == '-' ? mpq_class(-r) : r;
    }
    size_t slash = s.find('/');
    if (slash != std::string::npos) {
        std::string p = s.substr(0, slash), q = s.substr(slash + 1);
        auto digits = [](const std::string& x) {
            if (x.empty()) return false;
            for (char c : x)
                if (!std::isdigit(static_cast<unsigned char>(c))) return false;
            return true;
        };
        if (!digits(p) || !digits(q)) throw bad();
        mpz_class den(q, 10);
        if (den == 0) throw bad();
        mpq_class r(mpz_class(p, 10), den);
        r.canonicalize();
        return r;
    }
    size_t i = 0;
    std::string intpart, frac;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) intpart += s[i++];
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) frac += s[i++];
    }
    if (intpart.empty() && frac.empty()) throw bad();
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
        std::string e;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) e += s[i++];
        if (e.empty() || e.size() > 6) throw bad();
        exp10 = std::stol(e) * (neg ? -1 : 1);
    }
    if (i != s.size()) throw bad();
    mpz_class num(intpart + frac == "" ? "0" : intpart + frac, 10);
    exp10 -= static_cast<long>(frac.size());
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    mpq_class r = exp10 >= 0 ? mpq_class(num * p10) : mpq_class(num, p10);
    r.canonicalize();
    return r;
}

Specification parse_spec(const std::string& text) {
    Parser p(lex(text));
    p.run();

    Specification s;
    for (const auto& r : p.rules) {
        if (s.find_class(r.lhs) >= 0)
            throw Error(ErrorCode::DuplicateRule, std::to_string(r.line) + ":" + std::to_string(r.col) +
                                                      ": duplicate rule for class '" + r.lhs + "'");
        s.classes.push_back(r.lhs);
    }
    if (s.classes.empty()) throw SyntaxError(1, 1, "grammar has no rules");

    Resolver res(s);
    for (const auto& r : p.rules) s.productions.push_back(res.alts(r.alts));

    if (!p.axiom.empty()) {
        s.axiom = s.find_class(p.axiom);
        if (s.axiom < 0)
            throw Error(ErrorCode::UndeclaredAxiom, std::to_string(p.axiom_line) + ":" +
                                                        std::to_string(p.axiom_col) + ": axiom '" +
                                                        p.axiom + "' has no rule");
    }

    std::set<int> seen;
    for (const auto& d : p.decls) {
        std::string where = std::to_string(d.line) + ":" + std::to_string(d.col) + ": ";
        int a = s.find_atom(d.name);
        if (a < 0) {
            if (s.find_class(d.name) >= 0)
                throw Error(ErrorCode::WeightForNonAtom, where + "'" + d.name + "' is a class, not an atom");
            throw Error(ErrorCode::UnknownAtom, where + "'" + d.name + "' is not an atom of the grammar");
        }
        if (d.kind == "display") {
            s.atoms[a].display = d.value;
            continue;
        }
        mpq_class v;
        try {
            v = parse_rational(d.value);
        } catch (const Error&) {
            throw SyntaxError(d.line, d.col, "invalid number '" + d.value + "'");
        }
        if (d.kind == "weight") {
            if (v <= 0) throw Error(ErrorCode::InvalidWeight, where + "weights must be positive");
            s.weights[a] = v;
        } else {
            if (v <= 0 || v >= 1) throw Error(ErrorCode::InvalidTarget, where + "targets must lie in (0,1)");
            s.targets[a] = v;
        }
        if (seen.insert(a).second) s.distinguished.push_back(a);
    }
    return s;
}

Specification load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

}  // namespace freqgen

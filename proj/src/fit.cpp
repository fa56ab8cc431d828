#include "freqgen/fit.hpp"
#include "freqgen/error.hpp"
#include "freqgen/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace freqgen {

void TargetProfile::check(size_t num_atoms) const {
    if (mu.empty()) throw Error(ErrorCode::InvalidTarget, "no targets given");
    if (n < 1) throw Error(ErrorCode::SizeOutOfRange, "fit size must be >= 1");
    double sum = 0;
    for (const auto& [a, m] : mu) {
        if (a < 0 || static_cast<size_t>(a) >= num_atoms) throw Error(ErrorCode::UnknownAtom, "unknown target atom");
        if (!(m > 0 && m < 1)) throw Error(ErrorCode::InvalidTarget, "targets must lie in (0,1)");
        sum += m;
    }
    if (sum > 1 + 1e-9) throw Error(ErrorCode::InvalidTarget, "targets sum above 1");
}

double objective_from_profile(const std::map<int, double>& observed, const TargetProfile& targets) {
    double s = 0;
    for (const auto& [a, m] : targets.mu) {
        auto it = observed.find(a);
        double f = it == observed.end() ? 0.0 : it->second;
        if (f == 0) throw Error(ErrorCode::ZeroObservedFrequency, "observed frequency is zero");
        double r = (f - m) / f;
        s += r * r;
    }
    return std::sqrt(s);
}

double objective(std::shared_ptr<const StandardSpec> spec, const Weights& w, const TargetProfile& targets) {
    targets.check(spec->atoms.size());
    std::vector<int> atoms;
    for (const auto& [a, m] : targets.mu) atoms.push_back(a);
    auto prof = frequency_profile(spec, w, targets.n, atoms);
    std::map<int, double> obs;
    for (const auto& [a, q] : prof) obs[a] = q.get_d();
    return objective_from_profile(obs, targets);
}

int precision_bits(int n, double epsilon) {
    if (!(epsilon > 0 && epsilon < 1)) throw Error(ErrorCode::DomainError, "epsilon must lie in (0,1)");
    if (n < 1) throw Error(ErrorCode::DomainError, "size must be >= 1");
    double rhs = 1 + (std::log(3.0) + std::log(static_cast<double>(n)) - std::log(std::log1p(epsilon))) / std::log(2.0);
    int b = static_cast<int>(std::ceil(rhs - 1e-12));
    return std::max(b, 2);
}

bool precision_bound_holds(int n, double epsilon, int b) {
    double rhs = 1 + (std::log(3.0) + std::log(static_cast<double>(n)) - std::log(std::log1p(epsilon))) / std::log(2.0);
    return b >= 2 && b >= rhs - 1e-12;
}

namespace {

constexpr double kLogBound = 40.0;

// Rounds w to `bits` significant binary digits, exactly.
mpq_class round_weight(double w, int bits) {
    int e;
    double m = std::frexp(w, &e);  // w = m * 2^e, 0.5 <= m < 1
    double scaled = std::ldexp(m, bits);
    mpz_class mant(static_cast<long>(std::llround(scaled)));
    int shift = e - bits;
    mpq_class q;
    if (shift >= 0) {
        mpz_class p;
        mpz_mul_2exp(p.get_mpz_t(), mant.get_mpz_t(), static_cast<unsigned long>(shift));
        q = p;
    } else {
        mpz_class d;
        mpz_ui_pow_ui(d.get_mpz_t(), 2, static_cast<unsigned long>(-shift));
        q = mpq_class(mant, d);
    }
    q.canonicalize();
    return q;
}

class Problem {
public:
    Problem(std::shared_ptr<const StandardSpec> spec, const TargetProfile& t, const FitOptions& opt,
            std::vector<int> free_atoms, std::vector<double> base)
        : targets_(t), opt_(opt), free_(std::move(free_atoms)), base_(std::move(base)),
          eval_(spec, target_atoms(t), t.n, opt.kernel) {}

    static std::vector<int> target_atoms(const TargetProfile& t) {
        std::vector<int> a;
        for (const auto& [k, v] : t.mu) a.push_back(k);
        return a;
    }

    std::vector<double> weights(const std::vector<double>& x) const {
        std::vector<double> w = base_;
        for (size_t i = 0; i < free_.size(); ++i) w[free_[i]] = std::exp(std::clamp(x[i], -kLogBound, kLogBound));
        return w;
    }

    double operator()(const std::vector<double>& x) {
        ++evals;
        std::vector<double> w = weights(x);
        std::vector<double> f = eval_.evaluate(w);
        double s = 0;
        size_t i = 0;
        for (const auto& [a, m] : targets_.mu) {
            double fi = f[i++];
            if (!(fi > 0)) return std::numeric_limits<double>::infinity();
            double r = (fi - m) / fi;
            s += r * r;
        }
        double F = std::sqrt(s);
        if (opt_.keep_trajectory) trajectory.push_back({w, F});
        return F;
    }

    int evals = 0;
    std::vector<FitIterate> trajectory;

private:
    const TargetProfile& targets_;
    const FitOptions& opt_;
    std::vector<int> free_;
    std::vector<double> base_;
    ProfileEvaluator eval_;
};

struct Vertex {
    std::vector<double> x;
    double f;
};

enum class Stop { Tolerance, Collapsed, Stalled, Budget };

// Nelder-Mead on a simplex around x0 with edge `step`.
Stop nelder_mead(Problem& P, std::vector<double>& best, double& fbest, double step, const FitOptions& opt) {
    const size_t d = best.size();
    std::vector<Vertex> S;
    S.push_back({best, fbest});
    for (size_t i = 0; i < d && P.evals < opt.max_evaluations; ++i) {
        std::vector<double> x = best;
        x[i] += (x[i] + step > kLogBound) ? -step : step;
        S.push_back({x, P(x)});
    }
    if (S.size() < d + 1) return Stop::Budget;
    auto clampv = [](std::vector<double>& x) {
        for (auto& v : x) v = std::clamp(v, -kLogBound, kLogBound);
    };
    double last_best = fbest;
    int stall = 0;
    while (true) {
        std::stable_sort(S.begin(), S.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (S[0].f < fbest) {
            fbest = S[0].f;
            best = S[0].x;
        }
        if (fbest <= opt.tolerance) return Stop::Tolerance;
        double diam = 0;
        for (size_t i = 1; i <= d; ++i)
            for (size_t j = 0; j < d; ++j) diam = std::max(diam, std::fabs(S[i].x[j] - S[0].x[j]));
        if (diam < 1e-9) return Stop::Collapsed;
        if (P.evals >= opt.max_evaluations) return Stop::Budget;
        if (fbest < last_best * (1 - 1e-10)) {
            last_best = fbest;
            stall = 0;
        } else if (++stall > static_cast<int>(60 * (d + 1))) {
            return Stop::Stalled;
        }

        std::vector<double> c(d, 0.0);
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j) c[j] += S[i].x[j] / static_cast<double>(d);
        auto along = [&](double t) {
            std::vector<double> x(d);
            for (size_t j = 0; j < d; ++j) x[j] = c[j] + t * (S[d].x[j] - c[j]);
            clampv(x);
            return x;
        };
        std::vector<double> xr = along(-1.0);
        double fr = P(xr);
        if (fr < S[0].f) {
            std::vector<double> xe = along(-2.0);
            double fe = P(xe);
            S[d] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (fr < S[d - 1].f) {
            S[d] = {xr, fr};
            continue;
        }
        bool outside = fr < S[d].f;
        std::vector<double> xc = along(outside ? -0.5 : 0.5);
        double fc = P(xc);
        if (fc < (outside ? fr : S[d].f)) {
            S[d] = {xc, fc};
            continue;
        }
        for (size_t i = 1; i <= d; ++i) {
            for (size_t j = 0; j < d; ++j) S[i].x[j] = S[0].x[j] + 0.5 * (S[i].x[j] - S[0].x[j]);
            S[i].f = P(S[i].x);
            if (P.evals >= opt.max_evaluations) break;
        }
    }
}

}  // namespace

FitResult fit_weights(std::shared_ptr<const StandardSpec> spec, const TargetProfile& targets, const FitOptions& opt) {
    const size_t na = spec->atoms.size();
    targets.check(na);

    std::vector<double> base(na, 1.0);
    for (const auto& [a, w] : opt.initial) {
        if (!(w > 0)) throw Error(ErrorCode::InvalidWeight, "initial weights must be positive");
        base[a] = w;
    }
    std::vector<int> pinned = opt.pinned;
    double sum = 0;
    for (const auto& [a, m] : targets.mu) sum += m;
    // With every atom targeted, a global rescaling leaves every profile
    // unchanged, so one weight is fixed.
    if (pinned.empty() && targets.mu.size() == na && std::fabs(sum - 1) < 1e-9)
        pinned.push_back(targets.mu.begin()->first);
    std::vector<int> free_atoms;
    for (const auto& [a, m] : targets.mu)
        if (std::find(pinned.begin(), pinned.end(), a) == pinned.end()) free_atoms.push_back(a);
    for (int a : pinned) base[a] = 1.0;

    Problem P(spec, targets, opt, free_atoms, base);
    std::vector<double> best(free_atoms.size());
    for (size_t i = 0; i < free_atoms.size(); ++i) best[i] = std::log(base[free_atoms[i]]);
    double fbest = P(best);

    FitResult res;
    res.free_atoms = free_atoms;
    Stop stop = fbest <= opt.tolerance ? Stop::Tolerance : Stop::Collapsed;
    if (!free_atoms.empty() && stop != Stop::Tolerance) {
        RandomSource rng(opt.restart_seed.value_or(0));
        double step = 1.0;
        double before = fbest;
        int plateau = 0;
        for (int round = 0; round <= opt.max_restarts; ++round) {
            std::vector<double> start = best;
            if (opt.restart_seed && round > 0)
                for (auto& v : start) v += step * (2 * rng.uniform01() - 1);
            double fstart = start == best ? fbest : P(start);
            std::vector<double> cur = start;
            double fcur = fstart;
            stop = nelder_mead(P, cur, fcur, step, opt);
            if (fcur < fbest) {
                fbest = fcur;
                best = cur;
            }
            if (stop == Stop::Tolerance || stop == Stop::Budget) break;
            // Little progress across a whole restart counts towards a plateau.
            plateau = fbest > before * (1 - 1e-6) ? plateau + 1 : 0;
            before = fbest;
            if (plateau >= 2) break;
            step = std::max(step * 0.5, 1e-3);
        }
    }

    res.evaluations = P.evals;
    res.trajectory = std::move(P.trajectory);
    std::vector<double> w = P.weights(best);
    for (size_t a = 0; a < na; ++a) {
        bool listed = targets.mu.count(static_cast<int>(a)) || opt.initial.count(static_cast<int>(a));
        if (!listed && w[a] == 1.0) continue;
        res.weights.set(static_cast<int>(a), w[a] == 1.0 ? mpq_class(1) : round_weight(w[a], opt.mantissa_bits));
    }
    std::vector<int> atoms;
    for (const auto& [a, m] : targets.mu) atoms.push_back(a);
    res.profile = frequency_profile(spec, res.weights, targets.n, atoms);
    std::map<int, double> obs;
    for (const auto& [a, q] : res.profile) obs[a] = q.get_d();
    res.objective_value = objective_from_profile(obs, targets);
    res.converged = res.objective_value <= opt.tolerance;
    res.infeasible = !res.converged && stop != Stop::Budget;
    return res;
}

}  // namespace freqgen

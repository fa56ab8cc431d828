#include "freqgen/asympt.hpp"
#include "freqgen/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace freqgen {

namespace {

// Components with at least one internal edge, found from the reachability closure.
void cyclic_sccs(const TransferDescription& td, std::vector<std::vector<int>>& sccs, std::vector<int>& periods) {
    const int n = td.num_states();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (const auto& t : td.transitions) reach[t.from][t.to] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;
    std::vector<int> comp(n, -1);
    for (int i = 0; i < n; ++i) {
        if (comp[i] >= 0 || !reach[i][i]) continue;
        std::vector<int> members;
        for (int j = 0; j < n; ++j)
            if (j == i || (reach[i][j] && reach[j][i])) {
                comp[j] = static_cast<int>(sccs.size());
                members.push_back(j);
            }
        sccs.push_back(members);
    }
    for (size_t c = 0; c < sccs.size(); ++c) {
        std::vector<long> level(n, -1);
        level[sccs[c][0]] = 0;
        std::vector<int> queue{sccs[c][0]};
        for (size_t q = 0; q < queue.size(); ++q)
            for (const auto& t : td.transitions)
                if (t.from == queue[q] && comp[t.to] == static_cast<int>(c) && level[t.to] < 0) {
                    level[t.to] = level[t.from] + 1;
                    queue.push_back(t.to);
                }
        long g = 0;
        for (const auto& t : td.transitions)
            if (comp[t.from] == static_cast<int>(c) && comp[t.to] == static_cast<int>(c))
                g = std::gcd(g, std::labs(level[t.from] + 1 - level[t.to]));
        periods.push_back(static_cast<int>(g));
    }
}

}  // namespace

TransferSystem::TransferSystem(std::shared_ptr<const StandardSpec> spec)
    : spec_(std::move(spec)), td_(classify_regular(*spec_)) {
    cyclic_sccs(td_, sccs_, periods_);
}

bool TransferSystem::aperiodic() const {
    return std::all_of(periods_.begin(), periods_.end(), [](int p) { return p == 1; });
}

std::vector<double> TransferSystem::weight_vector(const Weights& w) const {
    std::vector<double> pi(num_atoms(), 1.0);
    for (int a = 0; a < num_atoms(); ++a) pi[a] = w.get(a).get_d();
    return pi;
}

Eigen::MatrixXd TransferSystem::weighted(const std::vector<double>& pi, const std::vector<double>& u) const {
    const int n = num_states();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : td_.transitions) A(t.from, t.to) += pi[t.atom] * u[t.atom];
    return A;
}

Eigen::MatrixXd TransferSystem::labelled(const std::vector<double>& pi, int atom) const {
    const int n = num_states();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : td_.transitions)
        if (t.atom == atom) A(t.from, t.to) += pi[t.atom];
    return A;
}

double TransferSystem::Q(double t, const std::vector<double>& pi, const std::vector<double>& u) const {
    const int n = num_states();
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - t * weighted(pi, u);
    return M.determinant();
}

double TransferSystem::Q(double t, const std::vector<double>& pi) const {
    return Q(t, pi, std::vector<double>(num_atoms(), 1.0));
}

Eigen::MatrixXd adjugate(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const long n = s.size();
    Eigen::VectorXd others(n);
    for (long i = 0; i < n; ++i) {
        double p = 1;
        for (long j = 0; j < n; ++j)
            if (j != i) p *= s(j);
        others(i) = p;
    }
    const Eigen::MatrixXd& U = svd.matrixU();
    const Eigen::MatrixXd& V = svd.matrixV();
    return V.determinant() * U.determinant() * (V * others.asDiagonal() * U.transpose());
}

double TransferSystem::dQ_dt(double t, const std::vector<double>& pi) const {
    const int n = num_states();
    Eigen::MatrixXd A = weighted(pi, std::vector<double>(num_atoms(), 1.0));
    Eigen::MatrixXd adj = adjugate(Eigen::MatrixXd::Identity(n, n) - t * A);
    return -(adj * A).trace();
}

std::vector<double> TransferSystem::dQ_du(double t, const std::vector<double>& pi) const {
    const int n = num_states();
    Eigen::MatrixXd A = weighted(pi, std::vector<double>(num_atoms(), 1.0));
    Eigen::MatrixXd adj = adjugate(Eigen::MatrixXd::Identity(n, n) - t * A);
    std::vector<double> out(num_atoms(), 0.0);
    for (int a = 0; a < num_atoms(); ++a) out[a] = -t * (adj * labelled(pi, a)).trace();
    return out;
}

TransferSystem build_transfer(std::shared_ptr<const StandardSpec> spec) { return TransferSystem(std::move(spec)); }

namespace {

void require_aperiodic(const TransferSystem& ts) {
    for (size_t c = 0; c < ts.component_periods().size(); ++c)
        if (ts.component_periods()[c] != 1)
            throw Error(ErrorCode::PeriodicSpec, "transition graph has a component of period " +
                                                     std::to_string(ts.component_periods()[c]));
}

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() == 0) return 0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    double r = 0;
    for (long i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
    return r;
}

double root_from(const TransferSystem& ts, const std::vector<double>& pi) {
    const std::vector<double> one(ts.num_atoms(), 1.0);
    double r = spectral_radius(ts.weighted(pi, one));
    if (!(r > 1e-300)) throw Error(ErrorCode::NoRootInRange, "the language is finite: Q(t,1) has no root");
    double rho = 1.0 / r;
    // Q > 0 on (0, rho); refine inside a tight bracket by bisection and Newton.
    double lo = rho * (1 - 1e-7), hi = rho * (1 + 1e-7);
    double qlo = ts.Q(lo, pi), qhi = ts.Q(hi, pi);
    if (!(qlo > 0) || !(qhi < 0)) return rho;  // root of even multiplicity
    double t = rho;
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * rho; ++it) {
        double q = ts.Q(t, pi);
        if (q == 0) break;
        if (q > 0)
            lo = t;
        else
            hi = t;
        double d = ts.dQ_dt(t, pi);
        double nt = d != 0 ? t - q / d : lo;
        t = (nt > lo && nt < hi) ? nt : 0.5 * (lo + hi);
    }
    return t;
}

}  // namespace

double dominant_root(const TransferSystem& ts, const Weights& w) {
    require_aperiodic(ts);
    return root_from(ts, ts.weight_vector(w));
}

namespace {

// Slopes at t from the derivatives of Q; t need not be a root.
std::vector<double> slopes_at(const TransferSystem& ts, double t, const std::vector<double>& pi) {
    double qt = ts.dQ_dt(t, pi);
    std::vector<double> du = ts.dQ_du(t, pi);
    for (double& x : du) x /= t * qt;
    return du;
}

}  // namespace

AsymptoticReport asymptotic_frequencies(const TransferSystem& ts, const Weights& w) {
    require_aperiodic(ts);
    std::vector<double> pi = ts.weight_vector(w);
    AsymptoticReport rep;
    rep.rho = root_from(ts, pi);
    double qt = ts.dQ_dt(rep.rho, pi);
    double scale = 0;
    for (const auto& t : ts.description().transitions) scale += pi[t.atom];
    if (std::fabs(qt) <= 1e-10 * std::max(1.0, scale))
        throw Error(ErrorCode::DegenerateDerivative, "dQ/dt vanishes at the dominant root");
    rep.simple_root = true;
    std::vector<double> s = slopes_at(ts, rep.rho, pi);
    for (int a = 0; a < ts.num_atoms(); ++a) rep.slopes[a] = s[a];
    return rep;
}

namespace {

struct System {
    const TransferSystem& ts;
    std::vector<int> free_atoms;
    std::vector<int> equations;  // target atoms with an equation
    std::map<int, double> targets;
    std::vector<double> base;

    std::vector<double> weights(const Eigen::VectorXd& x) const {
        std::vector<double> pi = base;
        for (size_t i = 0; i < free_atoms.size(); ++i) pi[free_atoms[i]] = std::exp(x(i));
        return pi;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
        const long k = static_cast<long>(free_atoms.size());
        double rho = x(k);
        std::vector<double> pi = weights(x);
        Eigen::VectorXd r(static_cast<long>(equations.size()) + 1);
        r(0) = ts.Q(rho, pi);
        std::vector<double> s = slopes_at(ts, rho, pi);
        for (size_t i = 0; i < equations.size(); ++i) r(i + 1) = s[equations[i]] - targets.at(equations[i]);
        return r;
    }
};

bool finite(const Eigen::VectorXd& v) {
    for (long i = 0; i < v.size(); ++i)
        if (!std::isfinite(v(i))) return false;
    return true;
}

// Damped Newton with a forward-difference Jacobian.  Returns the final residual norm.
double newton(const System& sys, Eigen::VectorXd& x, const SolveOptions& opt, int& iterations) {
    Eigen::VectorXd r = sys.residual(x);
    if (!finite(r)) return std::numeric_limits<double>::infinity();
    double norm = r.norm();
    const long m = x.size();
    for (iterations = 0; iterations < opt.max_iterations && norm > 1e-14; ++iterations) {
        Eigen::MatrixXd J(r.size(), m);
        for (long j = 0; j < m; ++j) {
            Eigen::VectorXd y = x;
            double h = 1e-7 * std::max(1.0, std::fabs(x(j)));
            y(j) += h;
            J.col(j) = (sys.residual(y) - r) / h;
        }
        Eigen::VectorXd dx = J.colPivHouseholderQr().solve(-r);
        if (!finite(dx)) break;
        double lambda = 1;
        bool moved = false;
        while (lambda > 1e-10) {
            Eigen::VectorXd y = x + lambda * dx;
            if (y(m - 1) > 0) {
                Eigen::VectorXd ry = sys.residual(y);
                if (finite(ry) && ry.norm() < norm) {
                    x = y;
                    r = ry;
                    norm = ry.norm();
                    moved = true;
                    break;
                }
            }
            lambda *= opt.damping;
        }
        if (!moved) break;
        if ((lambda * dx).norm() < 1e-15 * std::max(1.0, x.norm())) break;
    }
    return norm;
}

}  // namespace

SolveResult solve_asymptotic_weights(const TransferSystem& ts, const std::map<int, double>& targets,
                                     const Weights& base, const SolveOptions& opt) {
    require_aperiodic(ts);
    const int na = ts.num_atoms();
    double sum = 0;
    for (const auto& [a, mu] : targets) {
        if (a < 0 || a >= na) throw Error(ErrorCode::UnknownAtom, "unknown target atom");
        if (!(mu > 0 && mu < 1)) throw Error(ErrorCode::InvalidTarget, "targets must lie in (0,1)");
        sum += mu;
    }
    if (targets.empty()) throw Error(ErrorCode::InvalidTarget, "no targets given");
    if (sum > 1 + 1e-12) throw Error(ErrorCode::InvalidTarget, "targets sum above 1");

    System sys{ts, {}, {}, targets, ts.weight_vector(base)};
    bool all = static_cast<int>(targets.size()) == na;
    for (const auto& [a, mu] : targets) {
        if (all && a == targets.begin()->first) continue;  // fixed; its equation follows from the others
        sys.free_atoms.push_back(a);
        sys.equations.push_back(a);
    }
    if (all && std::fabs(sum - 1) > 1e-9)
        throw Error(ErrorCode::InvalidTarget, "targets over every atom must sum to 1");

    const long k = static_cast<long>(sys.free_atoms.size());
    auto attempt = [&](double start, int index, SolveResult& best) {
        Eigen::VectorXd x(k + 1);
        std::vector<double> pi = sys.base;
        for (long i = 0; i < k; ++i) {
            double v = start > 0 ? start : pi[sys.free_atoms[i]];
            x(i) = std::log(v);
            pi[sys.free_atoms[i]] = v;
        }
        try {
            x(k) = root_from(ts, pi);
        } catch (const Error&) {
            return;
        }
        int its = 0;
        newton(sys, x, opt, its);
        SolveResult res;
        std::vector<double> w = sys.weights(x);
        for (const auto& [a, mu] : targets)
            if (!(w[a] > 0) || !std::isfinite(w[a])) return;
        for (const auto& [a, mu] : targets) res.weights.set(a, mpq_class(w[a]));
        for (const auto& [a, q] : base.entries)
            if (!targets.count(a)) res.weights.set(a, q);
        try {
            AsymptoticReport rep = asymptotic_frequencies(ts, res.weights);
            double err = 0;
            for (const auto& [a, mu] : targets) err = std::max(err, std::fabs(rep.slopes.at(a) - mu));
            res.rho = rep.rho;
            res.residual = err;
        } catch (const Error&) {
            return;
        }
        res.start_index = index;
        res.iterations = its;
        if (best.start_index < 0 || res.residual < best.residual) best = res;
    };

    SolveResult best;
    attempt(0, 0, best);
    if (best.start_index >= 0 && best.residual < opt.tolerance) return best;
    for (int j = 0; j < opt.starts; ++j) {
        double s = std::pow(10.0, -3.0 + 6.0 * j / std::max(1, opt.starts - 1));
        attempt(s, j + 1, best);
    }
    if (best.start_index < 0 || !(best.residual < opt.tolerance))
        throw Error(ErrorCode::NoSolutionFound,
                    "no weights reach the asymptotic targets" +
                        (best.start_index >= 0 ? " (best residual " + std::to_string(best.residual) + ")"
                                               : std::string()));
    return best;
}

}  // namespace freqgen

#pragma once

#include "freqgen/count.hpp"

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <vector>

namespace freqgen {

// Transfer matrix of a right-linear specification.  Entry (i,j) of T(t,u) is
// the sum of pi_a * u_a * t over the transitions i -> j labelled a.
class TransferSystem {
public:
    explicit TransferSystem(std::shared_ptr<const StandardSpec> spec);

    const StandardSpec& spec() const { return *spec_; }
    const TransferDescription& description() const { return td_; }
    int num_states() const { return td_.num_states(); }
    int num_atoms() const { return static_cast<int>(spec_->atoms.size()); }

    // sum over transitions of pi_a * u_a, per state pair (no factor t).
    Eigen::MatrixXd weighted(const std::vector<double>& pi, const std::vector<double>& u) const;
    // Transitions labelled a only, weighted by pi_a.
    Eigen::MatrixXd labelled(const std::vector<double>& pi, int atom) const;

    // Q(t,u) = det(I - T(t,u)).
    double Q(double t, const std::vector<double>& pi, const std::vector<double>& u) const;
    double Q(double t, const std::vector<double>& pi) const;
    // dQ/dt and dQ/du_a at (t, u = 1).
    double dQ_dt(double t, const std::vector<double>& pi) const;
    std::vector<double> dQ_du(double t, const std::vector<double>& pi) const;

    // Cyclic strongly connected components of the transition graph and the
    // gcd of their cycle lengths.
    const std::vector<std::vector<int>>& cyclic_components() const { return sccs_; }
    const std::vector<int>& component_periods() const { return periods_; }
    bool aperiodic() const;

    // Pi as a dense vector of doubles, absent atoms at 1.
    std::vector<double> weight_vector(const Weights& w) const;

private:
    std::shared_ptr<const StandardSpec> spec_;
    TransferDescription td_;
    std::vector<std::vector<int>> sccs_;
    std::vector<int> periods_;
};

// adj(M) through the singular value decomposition, stable when M is singular.
Eigen::MatrixXd adjugate(const Eigen::MatrixXd& M);

TransferSystem build_transfer(std::shared_ptr<const StandardSpec> spec);

// Smallest positive root of Q(t,1).  Throws PeriodicSpec or NoRootInRange.
double dominant_root(const TransferSystem& ts, const Weights& w);

struct AsymptoticReport {
    double rho = 0;
    bool simple_root = false;
    std::map<int, double> slopes;  // every atom
};

AsymptoticReport asymptotic_frequencies(const TransferSystem& ts, const Weights& w);

struct SolveOptions {
    int max_iterations = 200;
    double damping = 0.5;  // step shrink factor during backtracking
    int starts = 16;       // log-spaced in [1e-3, 1e3]
    double tolerance = 1e-8;
};

struct SolveResult {
    Weights weights;
    double rho = 0;
    double residual = 0;
    int start_index = -1;
    int iterations = 0;
};

// Weights whose asymptotic slopes equal the targets.  Untargeted atoms keep
// their weight in `base`.  When the targets cover every atom the first one is
// held at its base weight.  Throws NoSolutionFound or PeriodicSpec.
SolveResult solve_asymptotic_weights(const TransferSystem& ts, const std::map<int, double>& targets,
                                     const Weights& base = {}, const SolveOptions& opt = {});

}  // namespace freqgen

#pragma once

#include "freqgen/freq.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace freqgen {

struct TargetProfile {
    std::map<int, double> mu;  // atom -> targeted frequency in (0,1)
    int n = 0;

    void check(size_t num_atoms) const;
};

struct FitOptions {
    double tolerance = 1e-5;
    int max_evaluations = 5000;
    std::map<int, double> initial;  // starting weights; others start at 1
    std::vector<int> pinned;        // atoms held at weight 1
    std::optional<uint64_t> restart_seed;
    int max_restarts = 6;
    bool keep_trajectory = false;
    int mantissa_bits = 32;  // returned weights are rounded to this many significant bits
    Kernel kernel = Kernel::Serial;
};

struct FitIterate {
    std::vector<double> weights;  // per atom
    double objective;
};

struct FitResult {
    Weights weights;
    double objective_value = 0;  // exact profile of the returned weights
    int evaluations = 0;
    bool converged = false;
    bool infeasible = false;  // plateau above tolerance with a collapsed simplex
    std::vector<int> free_atoms;
    std::vector<FitIterate> trajectory;
    std::map<int, mpq_class> profile;
};

// Relative root-sum-square error, observed frequency in the denominator.
double objective_from_profile(const std::map<int, double>& observed, const TargetProfile& targets);
double objective(std::shared_ptr<const StandardSpec> spec, const Weights& w, const TargetProfile& targets);

FitResult fit_weights(std::shared_ptr<const StandardSpec> spec, const TargetProfile& targets,
                      const FitOptions& opt = {});

// Least b with b >= 1 + (ln 3 + ln n - ln ln(1+eps)) / ln 2, and b >= 2.
int precision_bits(int n, double epsilon);
bool precision_bound_holds(int n, double epsilon, int b);

}  // namespace freqgen

// freqgen command line tool.
#include "freqgen/freqgen.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace freqgen;

namespace {

struct Common {
    std::string spec_path;
    std::vector<std::string> weights;  // atom=value overrides
};

struct Loaded {
    Specification source;
    Standardized std;
    Weights weights;
};

std::pair<std::string, std::string> split_assignment(const std::string& s) {
    size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw Error(ErrorCode::InvalidWeight, "expected atom=value, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

int atom_or_throw(const Specification& s, const std::string& name) {
    int a = s.find_atom(name);
    if (a < 0) throw Error(ErrorCode::UnknownAtom, "unknown atom '" + name + "'");
    return a;
}

Loaded load(const Common& c) {
    Loaded l;
    l.source = load_spec(c.spec_path);
    l.std = standardize(l.source);
    l.weights = Weights::from_spec(l.source);
    for (const auto& item : c.weights) {
        auto [name, value] = split_assignment(item);
        int a = atom_or_throw(l.source, name);
        mpq_class q = parse_rational(value);
        if (q <= 0) throw Error(ErrorCode::InvalidWeight, "weights must be positive");
        l.weights.set(a, q);
    }
    return l;
}

std::string decimal(const mpq_class& q, int digits = 12) {
    std::ostringstream os;
    os << std::setprecision(digits) << q.get_d();
    return os.str();
}

std::string decimal(double x, int digits = 12) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("spec", c.spec_path, "grammar file")->required();
    app->add_option("-w,--weight", c.weights, "weight override atom=value (repeatable)");
}

std::string render(const DerivationTree& d, const std::string& format) {
    return format == "tree" ? render_tree(d) : render_word(d);
}

int cmd_validate(const Common& c) {
    Loaded l = load(c);
    const StandardSpec& s = *l.std.spec;
    const StandardizationReport& r = l.std.report;
    std::cout << "# field\tvalue\n";
    std::cout << "fingerprint\t" << spec_fingerprint(s) << "\n";
    std::cout << "axiom\t" << s.names[s.axiom] << "\n";
    std::cout << "classes\t" << s.source_classes << "\n";
    std::cout << "standard_classes\t" << s.size() << "\n";
    std::cout << "atoms\t" << s.atoms.size() << "\n";
    std::cout << "productive\t" << (r.productive ? "yes" : "no") << "\n";
    std::cout << "context_free\t" << (r.is_context_free ? "yes" : "no") << "\n";
    std::cout << "regular\t" << (r.is_regular ? "yes" : "no") << "\n";
    for (const auto& ic : r.introduced_classes) std::cout << "introduced\t" << ic.name << "\t" << ic.provenance << "\n";
    for (size_t i = 0; i < r.scc_decomposition.size(); ++i) {
        std::cout << "scc\t" << i << "\tgcd=" << r.cycle_gcd_per_scc[i] << "\t";
        for (size_t j = 0; j < r.scc_decomposition[i].size(); ++j)
            std::cout << (j ? " " : "") << s.names[r.scc_decomposition[i][j]];
        std::cout << "\n";
    }
    return 0;
}

CountTable table_for(const Loaded& l, int n, const std::string& cache, Kernel kernel) {
    if (!cache.empty()) {
        std::ifstream in(cache, std::ios::binary);
        if (in) {
            try {
                CountTable t = load_table(in, l.std.spec, l.weights);
                if (t.n_max >= n) return t;
            } catch (const Error& e) {
                std::cerr << "note: rebuilding cache " << cache << " (" << e.what() << ")\n";
            }
        }
    }
    CountOptions opt;
    opt.kernel = kernel;
    CountTable t = build_count_table(l.std.spec, l.weights, n, opt);
    if (!cache.empty()) {
        std::ofstream out(cache, std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write cache file " + cache);
        save_table(t, out);
    }
    return t;
}

int class_or_axiom(const StandardSpec& s, const std::string& name) {
    if (name.empty()) return s.axiom;
    int c = s.find_class(name);
    if (c < 0) throw Error(ErrorCode::UnknownClass, "unknown class '" + name + "'");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random generation of combinatorial structures with controlled atom frequencies"};
    app.require_subcommand(1);
    Common common;
    int size = -1, m = 1, workers = 1;
    std::optional<uint64_t> seed;
    std::string format = "word", cls, cache, method = "auto", occurrences;
    bool all_sizes = false, omp = false, trace = false;
    std::vector<std::string> targets, initial, pinned;
    double tolerance = 1e-5;
    int max_evals = 5000;
    std::optional<uint64_t> restart_seed;

    auto* validate = app.add_subcommand("validate", "print the standardization report");
    add_common(validate, common);

    auto* count_cmd = app.add_subcommand("count", "exact weighted count of a class");
    add_common(count_cmd, common);
    count_cmd->add_option("-n,--size", size, "size")->required()->check(CLI::NonNegativeNumber);
    count_cmd->add_option("--class", cls, "class (default: axiom)");
    count_cmd->add_flag("--all", all_sizes, "print every size up to --size");
    count_cmd->add_option("--cache", cache, "binary table cache file");
    count_cmd->add_flag("--openmp", omp, "use the OpenMP convolution kernel");

    auto* sample = app.add_subcommand("sample", "draw structures of a given size");
    add_common(sample, common);
    sample->add_option("-n,--size", size, "size")->required()->check(CLI::NonNegativeNumber);
    sample->add_option("-m,--count", m, "number of structures")->check(CLI::NonNegativeNumber);
    sample->add_option("-s,--seed", seed, "random seed (default: fresh, printed)");
    sample->add_option("-f,--format", format, "word, tree or tsv")
        ->check(CLI::IsMember({"word", "tree", "tsv"}));
    sample->add_option("--class", cls, "class (default: axiom)");
    sample->add_option("--workers", workers, "independent sub-streams")->check(CLI::PositiveNumber);
    sample->add_option("--cache", cache, "binary table cache file");
    sample->add_flag("--trace", trace, "also print exact emission probabilities (tsv format)");

    auto* freqs = app.add_subcommand("freqs", "exact expected atom frequencies");
    add_common(freqs, common);
    freqs->add_option("-n,--size", size, "size")->required()->check(CLI::PositiveNumber);
    freqs->add_option("--method", method, "auto, dp or pointing")->check(CLI::IsMember({"auto", "dp", "pointing"}));

    auto* fit = app.add_subcommand("fit", "fit weights reaching target frequencies at a fixed size");
    add_common(fit, common);
    fit->add_option("-n,--size", size, "size")->required()->check(CLI::PositiveNumber);
    fit->add_option("-t,--target", targets, "target override atom=frequency (repeatable)");
    fit->add_option("--tolerance", tolerance, "objective tolerance")->check(CLI::PositiveNumber);
    fit->add_option("--max-evals", max_evals, "objective evaluation budget")->check(CLI::PositiveNumber);
    fit->add_option("--init", initial, "initial weight atom=value (repeatable)");
    fit->add_option("--pin", pinned, "atom held at weight 1 (repeatable)");
    fit->add_option("--restart-seed", restart_seed, "seed for randomized restarts");

    auto* asympt = app.add_subcommand("asympt", "dominant singularity and asymptotic slopes of a regular grammar");
    add_common(asympt, common);

    auto* solve = app.add_subcommand("solve", "weights reaching asymptotic target frequencies");
    add_common(solve, common);
    solve->add_option("-t,--target", targets, "target override atom=frequency (repeatable)");

    auto* exact = app.add_subcommand("exact-sample", "uniform structures with exact occurrence counts");
    add_common(exact, common);
    exact->add_option("-n,--size", size, "size")->required()->check(CLI::NonNegativeNumber);
    exact->add_option("-o,--occurrences", occurrences, "counts such as a=2,b=2")->required();
    exact->add_option("-m,--count", m, "number of structures")->check(CLI::NonNegativeNumber);
    exact->add_option("-s,--seed", seed, "random seed (default: fresh, printed)");
    exact->add_option("-f,--format", format, "word, tree or tsv")->check(CLI::IsMember({"word", "tree", "tsv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*validate) return cmd_validate(common);

        if (*count_cmd) {
            Loaded l = load(common);
            CountTable t = table_for(l, size, cache, omp ? Kernel::OpenMP : Kernel::Serial);
            int c = class_or_axiom(*l.std.spec, cls);
            if (all_sizes) {
                std::cout << "# size\tcount\n";
                for (int n = 0; n <= size; ++n) std::cout << n << "\t" << count(t, c, n).get_str() << "\n";
            } else {
                std::cout << count(t, c, size).get_str() << "\n";
            }
            return 0;
        }

        if (*sample) {
            Loaded l = load(common);
            uint64_t s = seed ? *seed : fresh_seed();
            CountTable t = table_for(l, size, cache, Kernel::Serial);
            int c = class_or_axiom(*l.std.spec, cls);
            SampleOptions opt;
            opt.trace = trace;
            std::cout << "# seed=" << s << " fingerprint=" << t.fingerprint << "\n";
            std::vector<DerivationTree> out;
            if (workers > 1) {
                out = sample_sharded(t, c, size, m, s, workers, opt);
            } else {
                RandomSource rng(s);
                out = sample_many(t, c, size, m, rng, opt);
            }
            if (format == "tsv") std::cout << "# index\tword" << (trace ? "\tprobability" : "") << "\n";
            for (size_t i = 0; i < out.size(); ++i) {
                if (format == "tsv") {
                    std::cout << i << "\t" << render_word(out[i]);
                    if (trace) std::cout << "\t" << out[i].trace_probability.get_str();
                    std::cout << "\n";
                } else {
                    std::cout << render(out[i], format) << "\n";
                }
            }
            return 0;
        }

        if (*freqs) {
            Loaded l = load(common);
            FreqMethod fm = method == "dp" ? FreqMethod::DP : method == "pointing" ? FreqMethod::Pointing : FreqMethod::Auto;
            auto prof = frequency_profile(l.std.spec, l.weights, size, {}, fm);
            std::cout << "# atom\tfrequency\tdecimal\n";
            for (const auto& [a, q] : prof)
                std::cout << l.std.spec->atoms[a].name << "\t" << q.get_str() << "\t" << decimal(q) << "\n";
            return 0;
        }

        if (*fit) {
            Loaded l = load(common);
            const StandardSpec& s = *l.std.spec;
            TargetProfile tp;
            tp.n = size;
            for (const auto& [a, q] : l.source.targets) tp.mu[a] = q.get_d();
            for (const auto& item : targets) {
                auto [name, value] = split_assignment(item);
                tp.mu[atom_or_throw(l.source, name)] = parse_rational(value).get_d();
            }
            FitOptions opt;
            opt.tolerance = tolerance;
            opt.max_evaluations = max_evals;
            opt.restart_seed = restart_seed;
            for (const auto& item : initial) {
                auto [name, value] = split_assignment(item);
                opt.initial[atom_or_throw(l.source, name)] = parse_rational(value).get_d();
            }
            for (const auto& name : pinned) opt.pinned.push_back(atom_or_throw(l.source, name));
            FitResult r = fit_weights(l.std.spec, tp, opt);
            std::cout << "# objective=" << decimal(r.objective_value, 6) << " evaluations=" << r.evaluations
                      << " converged=" << (r.converged ? "yes" : "no") << "\n";
            std::cout << "# atom\tweight\texact\ttarget\tfrequency\n";
            for (int a = 0; a < static_cast<int>(s.atoms.size()); ++a) {
                if (!tp.mu.count(a) && !r.weights.entries.count(a)) continue;
                mpq_class w = r.weights.get(a);
                std::cout << s.atoms[a].name << "\t" << decimal(w, 10) << "\t" << w.get_str() << "\t"
                          << (tp.mu.count(a) ? decimal(tp.mu[a], 8) : "-") << "\t"
                          << (r.profile.count(a) ? decimal(r.profile[a], 8) : "-") << "\n";
            }
            if (r.infeasible) throw Error(ErrorCode::InfeasibleTarget, "objective plateaued above tolerance");
            return 0;
        }

        if (*asympt) {
            Loaded l = load(common);
            TransferSystem ts = build_transfer(l.std.spec);
            AsymptoticReport rep = asymptotic_frequencies(ts, l.weights);
            std::cout << "# quantity\tvalue\n";
            std::cout << "rho\t" << decimal(rep.rho, 15) << "\n";
            for (const auto& [a, mu] : rep.slopes)
                std::cout << "slope\t" << l.std.spec->atoms[a].name << "\t" << decimal(mu, 15) << "\n";
            return 0;
        }

        if (*solve) {
            Loaded l = load(common);
            std::map<int, double> tg;
            for (const auto& [a, q] : l.source.targets) tg[a] = q.get_d();
            for (const auto& item : targets) {
                auto [name, value] = split_assignment(item);
                tg[atom_or_throw(l.source, name)] = parse_rational(value).get_d();
            }
            if (tg.empty()) throw Error(ErrorCode::InvalidTarget, "no targets: use --target or target declarations");
            TransferSystem ts = build_transfer(l.std.spec);
            SolveResult r = solve_asymptotic_weights(ts, tg, l.weights);
            std::cout << "# quantity\tvalue\n";
            std::cout << "rho\t" << decimal(r.rho, 15) << "\n";
            std::cout << "residual\t" << decimal(r.residual, 3) << "\n";
            for (const auto& [a, q] : r.weights.entries)
                std::cout << "weight\t" << l.std.spec->atoms[a].name << "\t" << decimal(q, 15) << "\n";
            return 0;
        }

        if (*exact) {
            Loaded l = load(common);
            const StandardSpec& s = *l.std.spec;
            uint64_t sd = seed ? *seed : fresh_seed();
            std::vector<int> atoms;
            OccurrenceVector v = parse_occurrences(s, occurrences, size, atoms);
            std::cerr << "exact table: about " << predicted_table_bytes(s, atoms, v) << " bytes\n";
            ExactTable t = build_exact_table(l.std.spec, atoms, v);
            std::cout << "# seed=" << sd << " fingerprint=" << spec_fingerprint(s) << " fiber=" << fiber_count(t).get_str()
                      << "\n";
            RandomSource rng(sd);
            if (format == "tsv") std::cout << "# index\tword\n";
            for (int i = 0; i < m; ++i) {
                DerivationTree d = exact_sample(t, rng, SampleOptions{false});
                if (format == "tsv")
                    std::cout << i << "\t" << render_word(d) << "\n";
                else
                    std::cout << render(d, format) << "\n";
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cout.flush();
        std::cerr << "error\t" << code_name(e.code()) << "\t" << e.what() << "\n";
        return exit_status(e.code());
    } catch (const std::bad_alloc&) {
        std::cerr << "error\tBudgetExceeded\tout of memory\n";
        return 5;
    }
    return 0;
}

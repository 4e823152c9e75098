#pragma once

#include <iosfwd>

#include "provi/reverse.hpp"
#include "provi/zoo.hpp"

namespace provi {

struct ObjectiveSpec {
    std::string kind = "elbo";  // elbo | iwelbo | qwake | pwake | hvi
    int n = 1;
};

struct ExperimentConfig {
    std::string model = "conj";
    std::string guide;  // empty: the model's default guide
    ObjectiveSpec objective;
    StrategyOverrides strategy_overrides;
    std::string optimizer = "adam";  // adam | sgd
    double lr = 0.05;
    int steps = 100;
    int batch = 32;
    std::uint64_t seed = 0;
    GradMode mode = GradMode::Reverse;
    int workers = 1;
    std::string out;  // output path; empty = stdout
};

/// Parses a JSON config; errors carry the offending pointer path.
ExperimentConfig config_from_json_text(const std::string& text);

/// Applies the VI_SEED environment override, if set.
void apply_seed_env(ExperimentConfig& cfg);

LossFn build_objective(const ExperimentConfig& cfg);
ParamVector initial_params(const ExperimentConfig& cfg);

/// Optimizes the objective; one CSV row per step
/// (step, objective, <param columns>, wall_ms) and a summary JSON document.
/// Identical config and seed give identical CSV bytes up to the wall_ms
/// column, for any worker count.
void run_train(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& summary);

struct GradcheckOptions {
    int samples = 20000;
    std::vector<double> theta;  // empty: zoo init
    std::vector<double> v;      // empty: all ones
    double fd_step = 1e-3;
};

/// Compares the mean estimator tangent against central finite differences of
/// the common-random-number Monte-Carlo objective; emits a JSON report
/// {mean, std_err, finite_diff, fd_std_err, z_score, samples}.
void run_gradcheck(const ExperimentConfig& cfg, const GradcheckOptions& opt,
                   std::ostream& json_out);

/// Exhaustive density table of a finite-support model:
/// trace,density,log_density,tangent rows.
void run_enumerate(const std::string& model_id, std::ostream& csv);

/// Single density row for a model at a JSON-encoded trace.
void run_density(const std::string& model_id, const std::string& trace_json, std::ostream& csv);

/// Per-strategy tangent mean/variance and cost on small fixed losses.
void run_bench(std::uint64_t seed, int samples, std::ostream& csv);

}  // namespace provi

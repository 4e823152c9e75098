// Command-line front end: train, gradcheck, enumerate, density, bench.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "provi/driver.hpp"

namespace {

using provi::ExperimentConfig;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw provi::ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonFlags {
    std::string config_path;
    std::string model, guide, objective, mode, out, optimizer;
    int n = -1, steps = -1, batch = -1, workers = -1;
    double lr = -1.0;
    std::int64_t seed = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--model", model, "model id from the zoo");
        cmd->add_option("--guide", guide, "guide id (default: model's default)");
        cmd->add_option("--objective", objective, "elbo|iwelbo|qwake|pwake|hvi");
        cmd->add_option("--n", n, "particle count for particle-based objectives");
        cmd->add_option("--steps", steps, "optimization steps");
        cmd->add_option("--lr", lr, "learning rate");
        cmd->add_option("--batch", batch, "gradient samples per step");
        cmd->add_option("--seed", seed, "64-bit seed");
        cmd->add_option("--mode", mode, "forward|reverse");
        cmd->add_option("--optimizer", optimizer, "adam|sgd");
        cmd->add_option("--workers", workers, "worker threads (does not change results)");
        cmd->add_option("--out", out, "output path (default stdout)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = provi::config_from_json_text(slurp(config_path));
        if (!model.empty()) cfg.model = model;
        if (!guide.empty()) cfg.guide = guide;
        if (!objective.empty()) cfg.objective.kind = objective;
        if (n > 0) cfg.objective.n = n;
        if (steps >= 0) cfg.steps = steps;
        if (lr >= 0.0) cfg.lr = lr;
        if (batch > 0) cfg.batch = batch;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!mode.empty()) cfg.mode = mode == "forward" ? provi::GradMode::Forward
                                                        : provi::GradMode::Reverse;
        if (!optimizer.empty()) cfg.optimizer = optimizer;
        if (workers > 0) cfg.workers = workers;
        if (!out.empty()) cfg.out = out;
        provi::apply_seed_env(cfg);
        return cfg;
    }
};

class OutStream {
  public:
    explicit OutStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw provi::ConfigError("cannot open output path " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-based variational inference engine"};
    app.require_subcommand(1);

    CommonFlags train_flags, grad_flags;
    std::string enum_model = "twoflip";
    std::string dens_model = "twoflip", dens_trace;
    std::string enum_out, dens_out, bench_out;
    int grad_samples = 20000;
    std::vector<double> grad_theta, grad_v;
    std::int64_t bench_seed = 0;
    int bench_samples = 100000;

    CLI::App* train = app.add_subcommand("train", "optimize an objective, CSV per step");
    train_flags.attach(train);

    CLI::App* grad = app.add_subcommand("gradcheck", "estimator vs finite differences");
    grad_flags.attach(grad);
    grad->add_option("--samples", grad_samples, "gradient samples");
    grad->add_option("--theta", grad_theta, "parameter point (default: zoo init)");
    grad->add_option("--v", grad_v, "direction (default: all ones)");

    CLI::App* enu = app.add_subcommand("enumerate", "exhaustive density table");
    enu->add_option("--model", enum_model, "finite-support model id");
    enu->add_option("--out", enum_out, "output path");

    CLI::App* dens = app.add_subcommand("density", "density of a model at a JSON trace");
    dens->add_option("--model", dens_model, "model id");
    dens->add_option("--trace", dens_trace, "trace as JSON object")->required();
    dens->add_option("--out", dens_out, "output path");

    CLI::App* bench = app.add_subcommand("bench", "per-strategy tangent mean/variance/cost");
    bench->add_option("--seed", bench_seed, "seed");
    bench->add_option("--samples", bench_samples, "samples per strategy");
    bench->add_option("--out", bench_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) {
            ExperimentConfig cfg = train_flags.resolve();
            OutStream out(cfg.out);
            std::ostringstream summary;
            provi::run_train(cfg, out.get(), summary);
            std::cerr << summary.str();
        } else if (grad->parsed()) {
            ExperimentConfig cfg = grad_flags.resolve();
            provi::GradcheckOptions opt;
            opt.samples = grad_samples;
            opt.theta = grad_theta;
            opt.v = grad_v;
            OutStream out(cfg.out);
            provi::run_gradcheck(cfg, opt, out.get());
        } else if (enu->parsed()) {
            OutStream out(enum_out);
            provi::run_enumerate(enum_model, out.get());
        } else if (dens->parsed()) {
            OutStream out(dens_out);
            provi::run_density(dens_model, dens_trace, out.get());
        } else if (bench->parsed()) {
            OutStream out(bench_out);
            provi::run_bench(static_cast<std::uint64_t>(bench_seed), bench_samples, out.get());
        }
    } catch (const provi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const provi::UnsupportedError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const provi::Error& e) {
        std::cerr << "numeric abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric abort: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

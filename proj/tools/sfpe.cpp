// Experiment driver: solves the singular Fokker-Planck PDE variants, runs
// particle cross-validations, and emits plot-ready CSV/JSON artifacts.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sfpe/config.hpp"
#include "sfpe/experiments.hpp"

namespace {

int run_kind(const std::string& kind, const std::string& config_path, std::int64_t seed,
             const std::string& out_dir) {
    sfpe::ExperimentConfig cfg = config_path.empty()
                                     ? sfpe::ExperimentConfig::from_kv(sfpe::KeyValueFile{})
                                     : sfpe::ExperimentConfig::from_file(config_path);
    cfg.kind = kind;
    if (seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.drift.seed = cfg.seed;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    sfpe::RunResult res = sfpe::run_experiment(cfg);
    for (const auto& f : res.failures) std::cerr << "check failed: " << f << "\n";
    std::cout << (res.status == 0 ? "PASS" : "FAIL") << " " << kind << " -> " << res.out_dir
              << "\n";
    return res.status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sfpe: spectral solver and experiments for a non-local singular Fokker-Planck PDE"};
    app.require_subcommand(1);

    std::string config_path, out_dir, dir_a, dir_b;
    std::int64_t seed = -1;
    double compare_beta = 0.3;

    const char* kinds[] = {"solve-linear", "solve-nonlinear",       "particles",
                           "verify-besov", "verify-product",        "continuity-experiment",
                           "fk-crosscheck"};
    for (const char* kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind, std::string("run the ") + kind + " experiment");
        sub->add_option("--config", config_path, "experiment config file");
        sub->add_option("--seed", seed, "override the experiment seed");
        sub->add_option("--out", out_dir, "override the output directory");
    }
    CLI::App* cmp = app.add_subcommand("compare", "diff two run directories");
    cmp->add_option("dir_a", dir_a, "first run directory")->required();
    cmp->add_option("dir_b", dir_b, "second run directory")->required();
    cmp->add_option("--beta", compare_beta, "Besov exponent for the field diff");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmp->parsed()) {
            sfpe::CompareReport rep = sfpe::compare_runs(dir_a, dir_b, compare_beta);
            std::cout << rep.to_json() << "\n";
            return 0;
        }
        for (const char* kind : kinds)
            if (app.get_subcommand(kind)->parsed()) return run_kind(kind, config_path, seed, out_dir);
    } catch (const sfpe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

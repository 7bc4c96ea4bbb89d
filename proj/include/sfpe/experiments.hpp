#pragma once

#include <string>
#include <vector>

#include "sfpe/config.hpp"

namespace sfpe {

struct RunResult {
    int status = 0;  // 0 pass, 1 check failure
    std::vector<std::string> failures;
    std::string out_dir;
};

// Dispatch on cfg.kind, write artifacts under cfg.out_dir, return pass/fail.
RunResult run_experiment(const ExperimentConfig& cfg);

// Deterministic experiment inputs assembled from a config.
TimeField build_drift(const ExperimentConfig& cfg);
SpectralField build_kernel(const ExperimentConfig& cfg);
SpectralField build_v0(const ExperimentConfig& cfg);

struct CompareReport {
    bool identical_bytes = false;
    double max_beta_diff = 0.0;
    double max_l1_diff = 0.0;
    std::string to_json() const;
};

// Field-wise diff of two run directories holding solution.sfpt.
CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b, double beta);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace sfpe

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfpe/drift.hpp"
#include "sfpe/linear_fp.hpp"
#include "sfpe/nonlinearity.hpp"

namespace sfpe {

// Configuration problems exit with status 2; check failures with status 1.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Flat sectioned key-value file: `[section]` headers, `key = value` lines,
// `#` comments. Keys are addressed as "section.key".
class KeyValueFile {
  public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    // "auto" maps to -1, otherwise a positive real.
    double get_auto_or_double(const std::string& key, double fallback) const;
    std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);
    std::string echo() const;

  private:
    std::map<std::string, std::string> kv_;
};

struct ExperimentConfig {
    std::string kind;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    Grid grid{1, 512, 16.0 * 3.14159265358979323846};
    DriftSpec drift;
    double drift_calibrate_norm = -1.0;  // > 0: rescale so |b|_{C_T C^-alpha} hits it
    int drift_mollify_n = 0;             // 0: leave singular
    bool drift_band_taper = false;       // roll off the top octave before use
    double kernel_sigma = 2.0;
    Nonlinearity F = Nonlinearity::scaled_tanh(1.0, 1.0);
    InitialDensitySpec initial;
    SolverConfig solver;
    bool check_weak_residual = false;

    // particles
    int particle_count = 10000;
    double particle_step = 1e-3;
    int particle_mollify = 64;
    double kde_bandwidth = 0.6;
    int particle_snapshot_every = 0;
    std::vector<int> particle_ladder;
    bool particle_pde_compare = true;
    double particle_l1_threshold = 0.05;

    // verification sweeps
    std::vector<int> resolutions{256, 512, 1024};
    int ensemble = 100;
    double spread_tolerance = 0.25;

    // Feynman-Kac crosscheck
    int fk_paths = 100000;
    double fk_dt = 1.0 / 256.0;
    int fk_probes = 5;
    double fk_sigma_band = 3.0;

    std::vector<int> continuity_levels{4, 16, 64, 256};

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_kv(const KeyValueFile& kv);
    std::string echo() const;
};

}  // namespace sfpe

#include "sfpe/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sfpe {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

KeyValueFile KeyValueFile::parse_string(const std::string& text) {
    KeyValueFile kv;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv.kv_[section.empty() ? key : section + "." + key] = val;
    }
    return kv;
}

std::string KeyValueFile::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
    std::string s = get_string(key);
    try {
        std::size_t pos;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: '" + s + "'");
    }
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    double v = get_double(key);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ConfigError("config key " + key + ": not an integer");
    return i;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    std::string s = get_string(key);
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not an unsigned integer: '" + s + "'");
    }
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string s = get_string(key);
    std::transform(s.begin(), s.end(), s.begin(), ::tolower);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config key " + key + ": not a boolean: '" + s + "'");
}

double KeyValueFile::get_auto_or_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    std::string s = get_string(key);
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower == "auto") return -1.0;
    return get_double(key);
}

std::vector<int> KeyValueFile::get_ints(const std::string& key,
                                        const std::vector<int>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<int> out;
    for (const auto& tok : split_csv(get_string(key))) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": not an integer list");
        }
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key,
                                              const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& tok : split_csv(get_string(key))) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + ": not a number list");
        }
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
}

void KeyValueFile::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string KeyValueFile::echo() const {
    std::ostringstream os;
    std::string current;
    for (const auto& [key, val] : kv_) {
        auto dot = key.find('.');
        std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
        std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (section != current) {
            os << "[" << section << "]\n";
            current = section;
        }
        os << name << " = " << val << "\n";
    }
    return os.str();
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_kv(KeyValueFile::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueFile& kv) {
    ExperimentConfig c;
    c.kind = kv.get_string("experiment.kind", "");
    c.seed = kv.get_u64("experiment.seed", 1);
    c.out_dir = kv.get_string("experiment.out", "out");

    int dim = kv.get_int("grid.dim", 1);
    int modes = kv.get_int("grid.modes", 512);
    double length = kv.get_double("grid.length", 16.0 * 3.14159265358979323846);
    try {
        c.grid = make_grid(dim, modes, length);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    c.solver.alpha = kv.get_double("exponents.alpha", 0.25);
    c.solver.beta = kv.get_double("exponents.beta", 0.30);
    if (!(c.solver.alpha > 0 && c.solver.alpha < c.solver.beta && c.solver.beta < 0.5))
        throw ConfigError("exponents: constraint 0 < alpha < beta < 1/2 violated");

    c.drift.beta = c.solver.beta;
    c.drift.epsilon_reg = kv.get_double("drift.epsilon_reg", 0.05);
    c.drift.amplitude = kv.get_double("drift.amplitude", 1.0);
    c.drift.seed = kv.get_u64("drift.seed", c.seed);
    std::string profile = kv.get_string("drift.time_profile", "static");
    if (profile == "static") c.drift.profile = DriftSpec::TimeProfile::Static;
    else if (profile == "smooth_modulated") c.drift.profile = DriftSpec::TimeProfile::SmoothModulated;
    else throw ConfigError("drift.time_profile: expected 'static' or 'smooth_modulated'");
    c.drift_calibrate_norm = kv.get_double("drift.calibrate_norm", -1.0);
    c.drift_mollify_n = kv.get_int("drift.mollify_n", 0);
    c.drift_band_taper = kv.get_bool("drift.band_taper", false);

    c.kernel_sigma = kv.get_double("kernel.sigma", 2.0);

    std::string family = kv.get_string("nonlinearity.family", "tanh");
    if (family == "tanh") {
        c.F = Nonlinearity::scaled_tanh(kv.get_double("nonlinearity.a", 1.0),
                                        kv.get_double("nonlinearity.b0", 1.0));
    } else if (family == "constant") {
        c.F = Nonlinearity::constant(kv.get_double("nonlinearity.lambda", 1.0));
    } else if (family == "smooth_clamp") {
        c.F = Nonlinearity::smooth_clamp(kv.get_double("nonlinearity.scale", 1.0),
                                         kv.get_double("nonlinearity.level", 1.0));
    } else {
        throw ConfigError("nonlinearity.family: expected tanh | constant | smooth_clamp");
    }

    std::string shape = kv.get_string("initial.shape", "gaussian");
    if (shape == "gaussian") {
        InitialDensitySpec::Bump b;
        b.width = kv.get_double("initial.width", 2.0);
        if (kv.has("initial.center"))
            b.center = kv.get_doubles("initial.center", {});
        b.weight = 1.0;
        c.initial.bumps = {b};
    } else if (shape == "mixture") {
        auto centers = kv.get_doubles("initial.centers", {});
        auto widths = kv.get_doubles("initial.widths", {});
        auto weights = kv.get_doubles("initial.weights", {});
        if (c.grid.dim != 1) throw ConfigError("initial.mixture: flat lists support d=1 only");
        if (centers.size() != widths.size() || centers.size() != weights.size())
            throw ConfigError("initial.mixture: centers/widths/weights length mismatch");
        for (std::size_t i = 0; i < centers.size(); ++i)
            c.initial.bumps.push_back({{centers[i]}, widths[i], weights[i]});
    } else {
        throw ConfigError("initial.shape: expected gaussian | mixture");
    }

    c.solver.T = kv.get_double("solver.time_horizon", 0.5);
    c.solver.time_steps = kv.get_int("solver.time_steps", 256);
    c.solver.rho = kv.get_auto_or_double("solver.rho", -1.0);
    c.solver.picard_tol = kv.get_double("solver.picard_tol", 1e-9);
    c.solver.max_picard_iters = kv.get_int("solver.max_picard_iters", 200);
    c.solver.bony_c = kv.get_auto_or_double("solver.bony_c", -1.0);
    c.solver.outer_tol = kv.get_double("solver.outer_tol", 1e-7);
    c.solver.max_outer_iters = kv.get_int("solver.max_outer_iters", 30);
    c.solver.measure_seed = kv.get_u64("solver.measure_seed", 0xC0FFEE);
    try {
        c.solver.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    c.check_weak_residual = kv.get_bool("solver.check_weak_residual", false);

    c.particle_count = kv.get_int("particles.count", 10000);
    c.particle_step = kv.get_double("particles.step", 1e-3);
    c.particle_mollify = kv.get_int("particles.mollify_n", 64);
    c.kde_bandwidth = kv.get_double("particles.kde_bandwidth", 0.6);
    c.particle_snapshot_every = kv.get_int("particles.snapshot_every", 0);
    c.particle_ladder = kv.get_ints("particles.ladder", {});
    c.particle_pde_compare = kv.get_bool("particles.pde_compare", true);
    c.particle_l1_threshold = kv.get_double("particles.l1_threshold", 0.05);

    c.resolutions = kv.get_ints("verify.resolutions", {256, 512, 1024});
    c.ensemble = kv.get_int("verify.ensemble", 100);
    c.spread_tolerance = kv.get_double("verify.spread_tolerance", 0.25);

    c.fk_paths = kv.get_int("fk.paths", 100000);
    c.fk_dt = kv.get_double("fk.dt", 1.0 / 256.0);
    c.fk_probes = kv.get_int("fk.probes", 5);
    c.fk_sigma_band = kv.get_double("fk.sigma_band", 3.0);

    c.continuity_levels = kv.get_ints("continuity.levels", {4, 16, 64, 256});
    return c;
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os.precision(17);
    os << "[experiment]\nkind = " << kind << "\nseed = " << seed << "\nout = " << out_dir << "\n";
    os << "[grid]\ndim = " << grid.dim << "\nmodes = " << grid.modes
       << "\nlength = " << grid.length << "\n";
    os << "[exponents]\nalpha = " << solver.alpha << "\nbeta = " << solver.beta << "\n";
    os << "[drift]\nseed = " << drift.seed << "\namplitude = " << drift.amplitude
       << "\nepsilon_reg = " << drift.epsilon_reg << "\ntime_profile = "
       << (drift.profile == DriftSpec::TimeProfile::Static ? "static" : "smooth_modulated")
       << "\ncalibrate_norm = " << drift_calibrate_norm << "\nmollify_n = " << drift_mollify_n
       << "\nband_taper = " << (drift_band_taper ? "true" : "false") << "\n";
    os << "[kernel]\nsigma = " << kernel_sigma << "\n";
    os << "[nonlinearity]\nfamily = " << F.name() << "\n";
    os << "[solver]\ntime_horizon = " << solver.T << "\ntime_steps = " << solver.time_steps
       << "\nrho = " << solver.rho << "\npicard_tol = " << solver.picard_tol
       << "\nouter_tol = " << solver.outer_tol << "\nbony_c = " << solver.bony_c << "\n";
    return os.str();
}

}  // namespace sfpe

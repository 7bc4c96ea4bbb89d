#include "sfpe/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sfpe/besov.hpp"
#include "sfpe/field_io.hpp"
#include "sfpe/nonlinear_fp.hpp"
#include "sfpe/paraproduct.hpp"
#include "sfpe/particles.hpp"

namespace sfpe {

namespace fs = std::filesystem;

namespace {

void check(RunResult& r, bool ok, const std::string& what) {
    if (!ok) {
        r.status = 1;
        r.failures.push_back(what);
    }
}

double worst_ratio_from_third(const std::vector<double>& ratios) {
    // ratios[0] compares iterates 1 and 2; the gate starts at iterate 3.
    double worst = 0.0;
    for (std::size_t i = 1; i < ratios.size(); ++i) worst = std::max(worst, ratios[i]);
    return worst;
}

std::string drift_sidecar_json(const ExperimentConfig& cfg, double measured_norm) {
    nlohmann::json j;
    j["beta"] = cfg.drift.beta;
    j["epsilon_reg"] = cfg.drift.epsilon_reg;
    j["seed"] = cfg.drift.seed;
    j["amplitude"] = cfg.drift.amplitude;
    j["time_profile"] =
        cfg.drift.profile == DriftSpec::TimeProfile::Static ? "static" : "smooth_modulated";
    j["calibrate_norm"] = cfg.drift_calibrate_norm;
    j["mollify_n"] = cfg.drift_mollify_n;
    j["measured_negative_alpha_norm"] = measured_norm;
    return j.dump(2);
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

TimeField build_drift(const ExperimentConfig& cfg) {
    auto times = uniform_times(cfg.solver.T, cfg.solver.time_steps);
    TimeField b = sample_drift(cfg.drift, cfg.grid, times);
    if (cfg.drift_band_taper) apply_band_taper(b);
    if (cfg.drift_calibrate_norm > 0) {
        double n = rho_norm(b, 0.0, -cfg.solver.alpha);
        if (n > 0) {
            double s = cfg.drift_calibrate_norm / n;
            for (auto& snap : b.snaps) snap *= s;
        }
    }
    if (cfg.drift_mollify_n > 0) b = mollify(b, cfg.drift_mollify_n);
    return b;
}

SpectralField build_kernel(const ExperimentConfig& cfg) {
    return make_kernel(cfg.grid, cfg.kernel_sigma);
}

SpectralField build_v0(const ExperimentConfig& cfg) {
    return make_initial_density(cfg.initial, cfg.grid);
}

namespace {

RunResult run_solve_linear(const ExperimentConfig& cfg) {
    RunResult r;
    r.out_dir = cfg.out_dir;
    TimeField b = build_drift(cfg);
    SpectralField v0 = build_v0(cfg);
    auto [v, rep] = solve_linear(b, v0, cfg.solver);

    write_text_file(cfg.out_dir + "/config_echo.cfg", cfg.echo());
    write_time_field(cfg.out_dir + "/solution.sfpt", v);
    write_time_field(cfg.out_dir + "/drift.sfpt", b);
    write_text_file(cfg.out_dir + "/drift.json",
                    drift_sidecar_json(cfg, rho_norm(b, 0.0, -cfg.solver.alpha)));
    write_text_file(cfg.out_dir + "/solve_report.json", rep.to_json());
    MassReport mr = positivity_mass_report(v);
    write_text_file(cfg.out_dir + "/mass_trace.csv", mr.to_csv());

    check(r, rep.converged, "linear Picard iteration did not converge");
    if (rep.contraction_ratios.size() > 1)
        check(r, worst_ratio_from_third(rep.contraction_ratios) < 1.0,
              "contraction ratios reached 1");
    double mass0 = integral(v0);
    for (double m : mr.mass) check(r, std::abs(m - mass0) <= 1e-3, "mass drifted beyond 1e-3");
    if (cfg.check_weak_residual) {
        double res = weak_residual(v, b, v0, default_test_bank(cfg.grid));
        nlohmann::json j;
        j["weak_residual"] = res;
        write_text_file(cfg.out_dir + "/weak_residual.json", j.dump(2));
        check(r, res < 1e-5, "weak-formulation residual above 1e-5");
    }
    return r;
}

RunResult run_solve_nonlinear(const ExperimentConfig& cfg) {
    RunResult r;
    r.out_dir = cfg.out_dir;
    TimeField b = build_drift(cfg);
    SpectralField v0 = build_v0(cfg);
    SpectralField K = build_kernel(cfg);
    auto [v, rep] = solve_nonlinear(b, K, cfg.F, v0, cfg.solver);

    write_text_file(cfg.out_dir + "/config_echo.cfg", cfg.echo());
    write_time_field(cfg.out_dir + "/solution.sfpt", v);
    write_time_field(cfg.out_dir + "/drift.sfpt", b);
    write_text_file(cfg.out_dir + "/drift.json",
                    drift_sidecar_json(cfg, rho_norm(b, 0.0, -cfg.solver.alpha)));
    write_text_file(cfg.out_dir + "/nonlinear_report.json", rep.to_json());
    MassReport mr = positivity_mass_report(v);
    write_text_file(cfg.out_dir + "/mass_trace.csv", mr.to_csv());
    {
        std::ostringstream os;
        os.precision(15);
        os << "iterate,outer_ratio\n";
        for (std::size_t i = 0; i < rep.contraction_ratios.size(); ++i)
            os << i + 2 << "," << rep.contraction_ratios[i] << "\n";
        write_text_file(cfg.out_dir + "/contraction.csv", os.str());
    }

    check(r, rep.converged, "outer fixed point did not converge: " + rep.failure_hint);
    if (rep.contraction_ratios.size() > 1)
        check(r, worst_ratio_from_third(rep.contraction_ratios) <= 0.7,
              "outer contraction ratio above 0.7 from the third iterate");
    for (double m : mr.mass) check(r, std::abs(m - 1.0) <= 1e-3, "mass left [1-1e-3, 1+1e-3]");
    for (std::size_t j = 0; j < mr.min_value.size(); ++j)
        check(r, mr.min_value[j] >= -1e-6 * mr.max_value[j], "negative undershoot beyond 1e-6*max");
    return r;
}

RunResult run_particles(const ExperimentConfig& cfg) {
    RunResult r;
    r.out_dir = cfg.out_dir;
    TimeField b = build_drift(cfg);
    SpectralField v0 = build_v0(cfg);
    SpectralField K = build_kernel(cfg);

    SpectralField pde_terminal;
    bool have_pde = false;
    if (cfg.particle_pde_compare) {
        TimeField bn = mollify(b, cfg.particle_mollify);
        auto [v, rep] = solve_nonlinear(bn, K, cfg.F, v0, cfg.solver);
        if (!rep.converged) {
            check(r, false, "reference PDE solve failed: " + rep.failure_hint);
            return r;
        }
        pde_terminal = v.snaps.back();
        have_pde = true;
        write_field(cfg.out_dir + "/pde_terminal.sfpe", pde_terminal, cfg.solver.T);
    }

    std::vector<int> ladder = cfg.particle_ladder;
    if (ladder.empty()) ladder = {cfg.particle_count};
    std::ostringstream csv;
    csv.precision(12);
    csv << "n_particles,l1_distance\n";
    std::vector<double> dists;
    for (int n : ladder) {
        McKeanOptions opts;
        if (n == ladder.back()) opts.snapshot_every = cfg.particle_snapshot_every;
        McKeanRun run = simulate_mckean(b, cfg.particle_mollify, K, cfg.F, v0, n,
                                        cfg.particle_step, cfg.solver.T, cfg.seed, opts);
        if (!run.snapshots.empty()) {
            TimeField traj;
            traj.times = run.snapshot_times;
            for (const auto& snap : run.snapshots)
                traj.snaps.push_back(density_estimate(snap, cfg.kde_bandwidth, cfg.grid));
            write_time_field(cfg.out_dir + "/trajectory_kde.sfpt", traj);
        }
        SpectralField kde = density_estimate(run.ensemble, cfg.kde_bandwidth, cfg.grid);
        double d = have_pde ? l1_distance(kde, pde_terminal) : 0.0;
        dists.push_back(d);
        csv << n << "," << d << "\n";
        if (n == ladder.back()) {
            write_field(cfg.out_dir + "/kde_terminal.sfpe", kde, cfg.solver.T);
            std::ostringstream marg;
            marg.precision(12);
            marg << "x,kde,pde\n";
            auto kv = to_physical(kde);
            auto pv = have_pde ? to_physical(pde_terminal) : std::vector<double>(kv.size(), 0.0);
            for (std::size_t i = 0; i < kv.size(); ++i)
                marg << i * cfg.grid.cell() << "," << kv[i] << "," << pv[i] << "\n";
            write_text_file(cfg.out_dir + "/marginal.csv", marg.str());
        }
    }
    write_text_file(cfg.out_dir + "/config_echo.cfg", cfg.echo());
    write_text_file(cfg.out_dir + "/particle_ladder.csv", csv.str());

    if (have_pde) {
        check(r, dists.back() <= cfg.particle_l1_threshold,
              "terminal KDE/PDE L1 distance above threshold");
        if (dists.size() >= 2) {
            int inversions = 0;
            for (std::size_t i = 1; i < dists.size(); ++i)
                if (dists[i] > dists[i - 1]) ++inversions;
            check(r, inversions <= 1, "L1 distance not monotone in N (more than one inversion)");
        }
    }
    return r;
}

RunResult run_verify_besov(const ExperimentConfig& cfg) {
    RunResult r;
    r.out_dir = cfg.out_dir;
    double alpha = cfg.solver.alpha, beta = cfg.solver.beta;
    double theta = cfg.solver.theta();
    std::vector<double> t_grid;
    for (int q = 0; q <= 15; ++q) t_grid.push_back(std::pow(10.0, -4.0 + 3.3 * q / 15.0));

    std::ostringstream csv;
    csv.precision(12);
    csv << "N,smoothing_constant,approach_constant\n";
    std::vector<double> smooths, approaches;
    for (int n : cfg.resolutions) {
        Grid g = make_grid(cfg.grid.dim, n, cfg.grid.length);
        std::vector<SpectralField> ens;
        for (int i = 0; i < cfg.ensemble; ++i)
            ens.push_back(sample_random_field(g, cfg.seed, -alpha + 0.05, 1.0, 7000 + i));
        SchauderReport rep = schauder_constants(ens, -alpha, theta, t_grid);
        smooths.push_back(rep.smoothing_constant);
        approaches.push_back(rep.approach_constant);
        csv << n << "," << rep.smoothing_constant << "," << rep.approach_constant << "\n";
    }
    write_text_file(cfg.out_dir + "/config_echo.cfg", cfg.echo());
    write_text_file(cfg.out_dir + "/schauder_constants.csv", csv.str());

    auto spread = [](const std::vector<double>& v) {
        double lo = *std::min_element(v.begin(), v.end());
        double hi = *std::max_element(v.begin(), v.end());
        return lo > 0 ? (hi - lo) / lo : 1e300;
    };
    check(r, spread(smooths) <= cfg.spread_tolerance, "smoothing constant unstable across N");
    check(r, spread(approaches) <= cfg.spread_tolerance, "approach constant unstable across N");

    // Regularity slope of a drift sample at the finest resolution.
    Grid g = make_grid(cfg.grid.dim, cfg.resolutions.back(), cfg.grid.length);
    TimeField b = sample_drift(cfg.drift, g, {0.0, cfg.solver.T});
    SpectralField comp(g, 1);
    for (std::size_t m = 0; m < g.total(); ++m) comp.coef(0, m) = b.snaps.front().coef(0, m);
    RegularityFit fit = estimate_regularity(comp);
    nlohmann::json j;
    j["gamma_hat"] = fit.gamma_hat;
    j["target"] = -cfg.drift.beta;
    j["r_squared"] = fit.r_squared;
    write_text_file(cfg.out_dir + "/drift_regularity.json", j.dump(2));
    check(r, std::abs(fit.gamma_hat - (-cfg.drift.beta)) <= 0.15,
          "drift regularity slope misses -beta by more than 0.15");
    return r;
}

RunResult run_verify_product(const ExperimentConfig& cfg) {
    RunResult r;
    r.out_dir = cfg.out_dir;
    double gamma = 0.3, alpha = 0.25;
    std::ostringstream csv;
    csv << BonyReport::csv_header() << "\n";
    std::vector<double> cs;
    for (int n : cfg.resolutions) {
        Grid g = make_grid(cfg.grid.dim, n, cfg.grid.length);
        std::vector<SpectralField> fs, gs;
        for (int i = 0; i < cfg.ensemble; ++i) {
            fs.push_back(sample_random_field(g, cfg.seed, gamma + 0.05, 1.0, 500 + i));
            gs.push_back(sample_random_field(g, cfg.seed, -alpha + 0.05, 1.0, 9000 + i));
        }
        BonyReport rep = bony_constant(fs, gs, gamma, alpha, cfg.seed);
        cs.push_back(rep.c_measured);
        csv << rep.csv_row() << "\n";
    }
    write_text_file(cfg.out_dir + "/config_echo.cfg", cfg.echo());
    write_text_file(cfg.out_dir + "/bony_constants.csv", csv.str());

    // Companion table: the nonlinearity growth/Lipschitz ratios on the same
    // grid family.
    {
        Grid g = make_grid(cfg.grid.dim, cfg.resolutions.back(), cfg.grid.length);
        SpectralField K = make_kernel(g, cfg.kernel_sigma);
        std::vector<SpectralField> fs, gs;
        for (int i = 0; i < std::min(cfg.ensemble, 50); ++i) {
            auto mk_nonneg = [&](std::uint64_t stream) {
                SpectralField f = sample_random_field(g, cfg.seed, 1.5, 1.0, stream);
                auto v = to_physical(f);
                double mn = 0.0;
                for (double x : v) mn = std::min(mn, x);
                for (double& x : v) x += -mn + 1e-3;
                SpectralField out = from_physical(g, v);
                out *= (0.2 + 0.75 * (stream % 7) / 7.0) / integral(out);
                return out;
            };
            fs.push_back(mk_nonneg(2 * i));
            gs.push_back(mk_nonneg(2 * i + 1));
        }
        PhiBoundsReport pb = phi_bounds_report(fs, gs, K, cfg.F, cfg.solver.beta);
        write_text_file(cfg.out_dir + "/phi_bounds.csv",
                        PhiBoundsReport::csv_header() + "\n" + pb.csv_row() + "\n");
    }

    double lo = *std::min_element(cs.begin(), cs.end());
    double hi = *std::max_element(cs.begin(), cs.end());
    check(r, lo > 0 && (hi - lo) / lo <= cfg.spread_tolerance,
          "Bony constant unstable across N");
    return r;
}

RunResult run_continuity(const ExperimentConfig& cfg) {
    RunResult r;
    r.out_dir = cfg.out_dir;
    TimeField b = build_drift(cfg);
    SpectralField v0 = build_v0(cfg);
    SpectralField K = build_kernel(cfg);
    ContinuityReport rep =
        drift_continuity_experiment(b, K, cfg.F, v0, cfg.solver, cfg.continuity_levels);
    write_text_file(cfg.out_dir + "/config_echo.cfg", cfg.echo());
    write_text_file(cfg.out_dir + "/continuity_report.json", rep.to_json());
    write_text_file(cfg.out_dir + "/continuity.csv", rep.to_csv());
    check(r, !rep.aborted, "a mollification level failed to solve");
    check(r, rep.slope >= 0.8 && rep.slope <= 1.2, "log-log slope outside [0.8, 1.2]");
    check(r, rep.r_squared >= 0.95, "log-log regression R^2 below 0.95");
    return r;
}

RunResult run_fk_crosscheck(const ExperimentConfig& cfg) {
    RunResult r;
    r.out_dir = cfg.out_dir;
    ExperimentConfig smooth_cfg = cfg;
    if (smooth_cfg.drift_mollify_n <= 0) smooth_cfg.drift_mollify_n = 16;
    TimeField g = build_drift(smooth_cfg);
    SpectralField v0 = build_v0(cfg);
    auto [v, rep] = solve_linear(g, v0, cfg.solver);
    check(r, rep.converged, "linear solve did not converge");

    std::vector<std::vector<double>> probes;
    for (int p = 0; p < cfg.fk_probes; ++p) {
        std::vector<double> x(cfg.grid.dim);
        for (int a = 0; a < cfg.grid.dim; ++a)
            x[a] = cfg.grid.length * (0.25 + 0.5 * (p + 0.5 + 0.13 * a) / cfg.fk_probes);
        probes.push_back(x);
    }
    auto est = feynman_kac_solve(g, v0, cfg.solver.T, probes, cfg.fk_paths, cfg.fk_dt, cfg.seed);

    std::ostringstream csv;
    csv.precision(12);
    csv << "x,pde,fk,std_error,sigmas\n";
    for (std::size_t p = 0; p < probes.size(); ++p) {
        double pde = evaluate_at(v.snaps.back(), probes[p]);
        double sig = est[p].std_error > 0 ? std::abs(pde - est[p].value) / est[p].std_error : 0.0;
        csv << probes[p][0] << "," << pde << "," << est[p].value << "," << est[p].std_error << ","
            << sig << "\n";
        check(r, sig <= cfg.fk_sigma_band, "Feynman-Kac estimate outside the sigma band");
    }
    write_text_file(cfg.out_dir + "/config_echo.cfg", cfg.echo());
    write_text_file(cfg.out_dir + "/fk_probes.csv", csv.str());
    return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    if (cfg.kind == "solve-linear") return run_solve_linear(cfg);
    if (cfg.kind == "solve-nonlinear") return run_solve_nonlinear(cfg);
    if (cfg.kind == "particles") return run_particles(cfg);
    if (cfg.kind == "verify-besov") return run_verify_besov(cfg);
    if (cfg.kind == "verify-product") return run_verify_product(cfg);
    if (cfg.kind == "continuity-experiment") return run_continuity(cfg);
    if (cfg.kind == "fk-crosscheck") return run_fk_crosscheck(cfg);
    throw ConfigError("unknown experiment kind: '" + cfg.kind + "'");
}

CompareReport compare_runs(const std::string& dir_a, const std::string& dir_b, double beta) {
    CompareReport rep;
    std::string pa = dir_a + "/solution.sfpt", pb = dir_b + "/solution.sfpt";
    {
        std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
        if (!fa || !fb) throw std::runtime_error("compare: missing solution.sfpt");
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        rep.identical_bytes = sa.str() == sb.str();
    }
    TimeField a = read_time_field(pa), b = read_time_field(pb);
    if (a.times.size() != b.times.size() || !(a.snaps.front().grid() == b.snaps.front().grid()))
        throw std::runtime_error("compare: shape mismatch");
    for (std::size_t j = 0; j < a.snaps.size(); ++j) {
        SpectralField d = a.snaps[j] - b.snaps[j];
        rep.max_beta_diff = std::max(rep.max_beta_diff, besov_norm_value(d, beta));
        rep.max_l1_diff = std::max(rep.max_l1_diff, l1_norm(d));
    }
    return rep;
}

std::string CompareReport::to_json() const {
    nlohmann::json j;
    j["identical_bytes"] = identical_bytes;
    j["max_beta_diff"] = max_beta_diff;
    j["max_l1_diff"] = max_l1_diff;
    return j.dump(2);
}

}  // namespace sfpe

// Command-line driver: run scenarios, emit diagnostics CSVs and field
// snapshots, and run the built-in verification suites.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrflow/config.hpp"
#include "mrflow/diagnostics.hpp"
#include "mrflow/integrator.hpp"
#include "mrflow/scenarios.hpp"
#include "mrflow/snapshot.hpp"
#include "mrflow/studies.hpp"

namespace fs = std::filesystem;
using namespace mrflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string output_dir(const std::string& cli_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("MRFLOW_OUTDIR"); env && *env) return env;
    return ".";
}

bool is_preset(const std::string& s) {
    for (const auto& p : preset_names())
        if (p == s) return true;
    return false;
}

/// Resolved config document for a preset name or a config file, with typed
/// flags and --set overrides applied on top.
json resolve_config_doc(const std::string& source, const std::vector<std::string>& overrides) {
    json doc;
    if (is_preset(source)) {
        doc = config_to_json(preset(source));
    } else {
        std::ifstream is(source);
        if (!is) throw ConfigError("config: cannot open '" + source + "' (not a preset either)");
        try {
            doc = json::parse(is);
        } catch (const json::exception& e) {
            throw ConfigError("config: parse error in " + source + ": " + e.what());
        }
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return doc;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const std::string tok = csv.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    for (double v : parse_double_list(csv)) out.push_back(static_cast<int>(v));
    return out;
}

struct RunArtifacts {
    json summary;
};

int cmd_run(const std::string& source, const std::vector<std::string>& overrides,
            const std::string& out_opt) {
    const json doc = resolve_config_doc(source, overrides);
    const ScenarioConfig cfg = config_from_json(doc);
    const CoupledDomain dom = build_coupled_domain(cfg.domain);
    CoupledState st = init_scenario(cfg, dom);

    const fs::path outdir = output_dir(out_opt);
    fs::create_directories(outdir);

    CoupledStepper stepper(dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(), cfg.bc_domain2(),
                           cfg.threads);
    ConservationHistory history;
    std::vector<std::string> snapshot_files;

    auto write_snaps = [&](const CoupledState& s, long step) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_d1_%06ld.mfs", step);
        write_snapshot((outdir / name).string(), s.field1, dom.grid1, 1, s.time);
        snapshot_files.push_back(name);
        std::snprintf(name, sizeof name, "snapshot_d2_%06ld.mfs", step);
        write_snapshot((outdir / name).string(), s.field2, dom.grid2, 2, s.time);
        snapshot_files.push_back(name);
    };

    const double cr1 = courant_number(st.field1, dom.grid1, cfg.params1(), cfg.dt);
    const double cr2 = courant_number(st.field2, dom.grid2, cfg.params2(), cfg.dt);

    // one hook serves both cadences; gate each output on its own stride
    const int hist_every = std::max(1, cfg.history_cadence);
    int hook_every = hist_every;
    if (cfg.snapshot_cadence > 0)
        hook_every = static_cast<int>(std::gcd(static_cast<long>(hist_every),
                                               static_cast<long>(cfg.snapshot_cadence)));
    IntegrateHooks hooks;
    hooks.cadence = hook_every;
    hooks.on_record = [&](const CoupledState& s, long step) {
        const bool last = s.time >= cfg.t_end;
        if (step == 0 || last || step % hist_every == 0)
            history.record(s, dom.grid1, dom.grid2);
        const bool snap_due = cfg.snapshot_cadence > 0 && step % cfg.snapshot_cadence == 0;
        if (step == 0 || snap_due) write_snaps(s, step);
    };

    const auto t0 = std::chrono::steady_clock::now();
    const long steps = integrate(stepper, st, {cfg.scheme, cfg.rate_ratio}, cfg.dt, cfg.t_end,
                                 hooks);
    const auto t1 = std::chrono::steady_clock::now();
    if (steps > 0 && !(cfg.snapshot_cadence > 0 && steps % cfg.snapshot_cadence == 0))
        write_snaps(st, steps);

    write_history_csv(history, (outdir / "history.csv").string());

    const RhsEvalLedger& lg = stepper.ledger();
    const auto& rec0 = history.records.front();
    const auto& recN = history.records.back();
    json summary;
    summary["config"] = config_to_json(cfg);
    summary["result"] = {
        {"steps", steps},
        {"t_final", st.time},
        {"dt", cfg.dt},
        {"scheme", scheme_name(cfg.scheme)},
        {"m", cfg.rate_ratio},
        {"wall_seconds", std::chrono::duration<double>(t1 - t0).count()},
        {"courant", {{"domain1", cr1}, {"domain2", cr2}}},
        {"mass",
         {{"initial", rec0.mass},
          {"final", recN.mass},
          {"max_rel_drift", history.max_rel_mass_drift()},
          {"domain1_rel_drift",
           std::fabs(recN.mass1 - rec0.mass1) / std::fabs(rec0.mass1)},
          {"domain2_rel_drift",
           std::fabs(recN.mass2 - rec0.mass2) / std::fabs(rec0.mass2)}}},
        {"energy",
         {{"initial", rec0.energy},
          {"final", recN.energy},
          {"max_abs_drift", history.max_abs_energy_drift()}}},
        {"ledger",
         {{"fast_evals", lg.fast_evals},
          {"buffer_evals", lg.buffer_evals},
          {"slow_evals", lg.slow_evals},
          {"fast_elements", lg.fast_elements},
          {"buffer_elements", lg.buffer_elements},
          {"slow_elements", lg.slow_elements},
          {"total_elements", lg.total_elements()}}},
        {"seam_mismatch", stepper.max_seam_mismatch()},
        {"outputs", {{"history", "history.csv"}, {"snapshots", snapshot_files}}}};
    std::ofstream os(outdir / "run.json");
    os << summary.dump(2) << "\n";

    std::printf("run %s: %ld steps to t=%.17g, mass drift %.3e, %s\n", cfg.name.c_str(), steps,
                st.time, history.max_rel_mass_drift(), (outdir / "run.json").string().c_str());
    return kExitOk;
}

int cmd_study_convergence(const std::string& source, const std::vector<std::string>& overrides,
                          const std::string& dt_csv, int m, double ref_dt, double t_end,
                          const std::string& out_opt) {
    json doc = resolve_config_doc(source, overrides);
    ScenarioConfig cfg = config_from_json(doc);
    if (t_end > 0.0) cfg.t_end = t_end;
    std::vector<double> dts = parse_double_list(dt_csv);
    if (dts.empty()) {
        for (double f : {1.0, 0.5, 0.25, 0.125}) dts.push_back(cfg.dt * f);
    }
    const ConvergenceStudy study = study_convergence(cfg, dts, m, ref_dt);

    std::printf("temporal convergence, scenario %s, m=%d, t_end=%g, reference dt=%g\n",
                cfg.name.c_str(), m, cfg.t_end, study.ref_dt);
    std::printf("%12s %12s %6s %12s %6s %12s %6s\n", "dt", "err(rho)", "ord", "err(rho*u)", "ord",
                "err(rho*E)", "ord");
    json rows = json::array();
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const ConvergenceRow& r = study.rows[i];
        if (i == 0)
            std::printf("%12.6g %12.4e %6s %12.4e %6s %12.4e %6s\n", r.dt, r.err_rho, "-",
                        r.err_mom, "-", r.err_energy, "-");
        else
            std::printf("%12.6g %12.4e %6.2f %12.4e %6.2f %12.4e %6.2f\n", r.dt, r.err_rho,
                        r.ord_rho, r.err_mom, r.ord_mom, r.err_energy, r.ord_energy);
        rows.push_back({{"dt", r.dt},
                        {"err_rho", r.err_rho},
                        {"err_momentum", r.err_mom},
                        {"err_energy", r.err_energy},
                        {"order_rho", r.ord_rho},
                        {"order_momentum", r.ord_mom},
                        {"order_energy", r.ord_energy}});
    }
    const fs::path outdir = output_dir(out_opt);
    fs::create_directories(outdir);
    json out = {{"config", config_to_json(cfg)},
                {"m", m},
                {"ref_dt", study.ref_dt},
                {"rows", rows}};
    std::ofstream os(outdir / "convergence.json");
    os << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_study_speedup(const std::string& grid_csv, const std::string& m_csv,
                      const std::string& split_csv, int buffer_layers, double dt, int steps,
                      int threads, const std::string& out_opt) {
    const std::vector<int> grid = parse_int_list(grid_csv);
    if (grid.size() != 3) throw ConfigError("--grid must be nx,ny,nz");
    std::vector<int> m_list = parse_int_list(m_csv);
    std::vector<double> splits = parse_double_list(split_csv);
    for (double& s : splits)
        if (s > 1.0) s /= 100.0;  // percent form

    const auto rows = study_speedup(grid[0], grid[1], grid[2], m_list, splits, buffer_layers, dt,
                                    steps, threads);
    std::printf("speedup study, grid %dx%dx%d, buffer %d layers, %d steps of dt=%g\n", grid[0],
                grid[1], grid[2], buffer_layers, steps, dt);
    std::printf("%8s %4s %12s %12s %12s %12s\n", "split", "m", "ideal(spd)", "eval-ratio", "wcr",
                "slow/total");
    json jrows = json::array();
    for (const auto& r : rows) {
        std::printf("%8.2f %4d %12.3f %12.3f %12.2f %7ld/%ld\n", r.requested_fraction, r.m,
                    r.ideal, r.eval_ratio, r.wallclock_ratio, r.counts.slow, r.counts.total());
        jrows.push_back({{"m", r.m},
                         {"requested_fraction", r.requested_fraction},
                         {"achieved_fraction", r.achieved_fraction},
                         {"ideal", r.ideal},
                         {"eval_ratio", r.eval_ratio},
                         {"wallclock_ratio", r.wallclock_ratio},
                         {"mprk_element_evals", r.mprk_evals},
                         {"single_rate_element_evals", r.sr_evals}});
    }
    const fs::path outdir = output_dir(out_opt);
    fs::create_directories(outdir);
    std::ofstream os(outdir / "speedup.json");
    os << json{{"rows", jrows}}.dump(2) << "\n";
    return kExitOk;
}

int cmd_verify(bool quick) {
    int failures = 0;
    auto report = [&](bool ok, const std::string& what) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
        if (!ok) ++failures;
    };

    // tableau construction
    {
        bool ok = true;
        for (int m : {1, 2, 4, 8}) {
            const MprkTableauSet set = generate_mprk(base_rk2(), m);
            for (const ButcherTableau* t : {&set.fast, &set.buffer, &set.slow}) {
                ok = ok && std::fabs(t->weight_sum() - 1.0) <= 1e-14;
                ok = ok && std::fabs(t->weighted_abscissa() - 0.5) <= 1e-14;
                ok = ok && t->row_sum_defect() <= 1e-14;
            }
            const std::vector<double> fast_poly = stability_polynomial(set.fast);
            const std::vector<double> base_scaled{1.0, 1.0 / m, 0.5 / (static_cast<double>(m) * m)};
            const std::vector<double> want = poly_power(base_scaled, m);
            for (std::size_t d = 0; d < want.size(); ++d)
                ok = ok && std::fabs(fast_poly[d] - want[d]) <= 1e-14;
        }
        report(ok, "partition tableaus: order conditions and fast-subcycle equivalence");
    }

    // split transparency and conservation on a small coupled run
    {
        ScenarioConfig cfg = preset("convection2d");
        cfg.domain.lower.nx = cfg.domain.upper.nx = 32;
        cfg.domain.lower.nz = 32;
        cfg.domain.upper.nz = 48;
        cfg.dt = 0.02;
        const CoupledDomain dom = build_coupled_domain(cfg.domain);
        CoupledState st = init_scenario(cfg, dom);

        CoupledRhsContext ctx{dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(),
                              cfg.bc_domain2(), 1};
        const BulkCoefficients bulk =
            bulk_coefficients(cfg.mu1, cfg.mu2, cfg.params1().kappa_tilde(),
                              cfg.params2().kappa_tilde(), dom.grid1.dz, dom.grid2.dz);
        const InterfaceFluxes iface = interface_fluxes(st.field1, dom.grid1, cfg.params1(),
                                                       st.field2, dom.grid2, cfg.params2(), bulk);
        RhsScratch ws;
        std::vector<double> split_rhs, mono_rhs;
        rhs_region(Region::Buffer, ctx, st.field1, st.field2, &iface, ws, split_rhs, nullptr);
        rhs_region(Region::Slow, ctx, st.field1, st.field2, &iface, ws, split_rhs, nullptr);
        compute_rhs(st.field2, dom.grid2, cfg.params2(), cfg.bc_domain2(), &iface, 0,
                    dom.grid2.nz, ws, mono_rhs, 1);
        double dmax = 0.0;
        for (std::size_t t = 0; t < mono_rhs.size(); ++t)
            dmax = std::max(dmax, std::fabs(mono_rhs[t] - split_rhs[t]));
        report(dmax <= 1e-14, "region-split right-hand side equals the monolithic one");

        CoupledStepper stepper(dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(),
                               cfg.bc_domain2());
        ConservationHistory hist;
        IntegrateHooks hooks;
        hooks.on_record = [&](const CoupledState& s, long) {
            hist.record(s, dom.grid1, dom.grid2);
        };
        integrate(stepper, st, {SchemeKind::Mprk, 4}, cfg.dt, (quick ? 20 : 100) * cfg.dt, hooks);
        report(hist.max_rel_mass_drift() <= 1e-12, "coupled run conserves total mass");
        report(stepper.max_seam_mismatch() <= 1e-12, "buffer seam stage-equality holds");
    }

    // m=1 reduction
    {
        ScenarioConfig cfg = preset("convection2d");
        cfg.domain.lower.nx = cfg.domain.upper.nx = 24;
        cfg.domain.lower.nz = 24;
        cfg.domain.upper.nz = 32;
        cfg.dt = 0.02;
        const CoupledDomain dom = build_coupled_domain(cfg.domain);
        CoupledState a = init_scenario(cfg, dom);
        CoupledState b = a;
        CoupledStepper sa(dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(), cfg.bc_domain2());
        CoupledStepper sb(dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(), cfg.bc_domain2());
        integrate(sa, a, {SchemeKind::Mprk, 1}, cfg.dt, 20 * cfg.dt);
        integrate(sb, b, {SchemeKind::Rk2, 1}, cfg.dt, 20 * cfg.dt);
        double dmax = 0.0;
        for (std::size_t t = 0; t < a.field1.data.size(); ++t)
            dmax = std::max(dmax, std::fabs(a.field1.data[t] - b.field1.data[t]));
        for (std::size_t t = 0; t < a.field2.data.size(); ++t)
            dmax = std::max(dmax, std::fabs(a.field2.data[t] - b.field2.data[t]));
        report(dmax <= 1e-13, "multirate with m=1 reduces to the single-rate base method");
    }

    std::printf("%s\n", failures == 0 ? "verify: all checks passed" : "verify: FAILURES present");
    return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mrflow: coupled compressible-flow simulator with multirate "
                 "partitioned Runge-Kutta time integration"};
    app.require_subcommand(1);

    std::string source, outdir, dt_csv, m_csv = "2,4,8", split_csv = "24,54,84",
                        grid_csv = "20,20,50";
    std::vector<std::string> overrides;
    int m = 4, buffer_layers = 6, steps = 4, threads = 1;
    double ref_dt = -1.0, t_end = -1.0, dt = 0.02;
    bool quick = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("scenario", source, "preset name or config file (JSON)")->required();
        sub->add_option("--set", overrides, "override config values, e.g. --set time.dt=0.05");
        sub->add_option("--out", outdir, "output directory (default: $MRFLOW_OUTDIR or .)");
        sub->add_option("--scheme", [&overrides](const std::vector<std::string>& v) {
            overrides.push_back("time.scheme=\"" + v[0] + "\"");
            return true;
        }, "integration scheme: mprk, rk2, rk4ref");
        sub->add_option("--m", [&overrides](const std::vector<std::string>& v) {
            overrides.push_back("time.m=" + v[0]);
            return true;
        }, "multirate ratio");
        sub->add_option("--dt", [&overrides](const std::vector<std::string>& v) {
            overrides.push_back("time.dt=" + v[0]);
            return true;
        }, "step size");
        sub->add_option("--t-end", [&overrides](const std::vector<std::string>& v) {
            overrides.push_back("time.t_end=" + v[0]);
            return true;
        }, "final time");
        sub->add_option("--threads", [&overrides](const std::vector<std::string>& v) {
            overrides.push_back("threads=" + v[0]);
            return true;
        }, "RHS thread cap (default 1 for bitwise reproducibility)");
        sub->add_option("--buffer-layers", [&overrides](const std::vector<std::string>& v) {
            overrides.push_back("domain.buffer_layers=" + v[0]);
            return true;
        }, "slow-buffer depth in element layers");
    };

    CLI::App* run = app.add_subcommand("run", "run one scenario and emit artifacts");
    add_common(run);

    CLI::App* conv = app.add_subcommand("study-convergence",
                                        "temporal convergence study against an RK4 reference");
    add_common(conv);
    conv->add_option("--dt-list", dt_csv, "comma-separated halving dt sequence");
    conv->add_option("--study-m", m, "multirate ratio for the study (default 4)");
    conv->add_option("--ref-dt", ref_dt, "reference integrator step (default smallest dt / 10)");
    conv->add_option("--study-t-end", t_end, "override final time");

    CLI::App* spd = app.add_subcommand("study-speedup",
                                       "multirate vs single-rate work and wall-clock ratios");
    spd->add_option("--grid", grid_csv, "nx,ny,nz of the split box (default 20,20,50)");
    spd->add_option("--m-list", m_csv, "rate ratios (default 2,4,8)");
    spd->add_option("--split-list", split_csv, "slow fractions in percent (default 24,54,84)");
    spd->add_option("--buffer-layers", buffer_layers, "buffer depth (default 6)");
    spd->add_option("--dt", dt, "multirate step size (default 0.02)");
    spd->add_option("--steps", steps, "multirate steps per run (default 4)");
    spd->add_option("--threads", threads, "RHS thread cap");
    spd->add_option("--out", outdir, "output directory");

    CLI::App* ver = app.add_subcommand("verify", "run the built-in invariant suite");
    ver->add_flag("--quick", quick, "shorter runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(source, overrides, outdir);
        if (conv->parsed())
            return cmd_study_convergence(source, overrides, dt_csv, m, ref_dt, t_end, outdir);
        if (spd->parsed())
            return cmd_study_speedup(grid_csv, m_csv, split_csv, buffer_layers, dt, steps, threads,
                                     outdir);
        if (ver->parsed()) return cmd_verify(quick);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const NonPhysicalState& e) {
        std::fprintf(stderr, "numerical failure: %s (cell %ld)\n", e.what(), e.cell);
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitConfig;
}

#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mrflow/diagnostics.hpp"
#include "mrflow/integrator.hpp"
#include "mrflow/scenarios.hpp"

namespace mrflow {

// ----------------------------------------------------------------------------
// Temporal convergence study
// ----------------------------------------------------------------------------

struct ConvergenceRow {
    double dt = 0.0;
    double err_rho = 0.0, err_mom = 0.0, err_energy = 0.0;
    double ord_rho = 0.0, ord_mom = 0.0, ord_energy = 0.0;  // vs previous row
};

struct ConvergenceStudy {
    double ref_dt = 0.0;
    std::vector<ConvergenceRow> rows;
};

/// Runs the multirate scheme at each dt of a halving sequence and measures
/// final-time L2 errors against a fourth-order reference run at ref_dt
/// (default: smallest dt / 10). Orders are log2(e_2h/e_h).
inline ConvergenceStudy study_convergence(const ScenarioConfig& cfg, std::vector<double> dt_list,
                                          int m, double ref_dt = -1.0) {
    if (dt_list.size() < 3)
        throw std::invalid_argument("convergence study: need at least 3 dt values");
    for (std::size_t i = 1; i < dt_list.size(); ++i) {
        if (std::fabs(dt_list[i] - 0.5 * dt_list[i - 1]) > 1e-12 * dt_list[0])
            throw std::invalid_argument("convergence study: dt list must halve at each entry");
    }
    const CoupledDomain dom = build_coupled_domain(cfg.domain);
    if (ref_dt <= 0.0) ref_dt = dt_list.back() / 10.0;

    auto run = [&](Scheme scheme, double dt) {
        CoupledState st = init_scenario(cfg, dom);
        CoupledStepper stepper(dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(),
                               cfg.bc_domain2(), cfg.threads);
        integrate(stepper, st, scheme, dt, cfg.t_end);
        return st;
    };

    const CoupledState ref = run({SchemeKind::Rk4Ref, 1}, ref_dt);

    ConvergenceStudy out;
    out.ref_dt = ref_dt;
    for (double dt : dt_list) {
        const CoupledState st = run({SchemeKind::Mprk, m}, dt);
        const CoupledErrorNorms e = coupled_l2_error(st, ref, dom.grid1, dom.grid2);
        ConvergenceRow row;
        row.dt = dt;
        row.err_rho = e.rho;
        row.err_mom = e.momentum;
        row.err_energy = e.energy;
        if (!out.rows.empty()) {
            const ConvergenceRow& prev = out.rows.back();
            row.ord_rho = std::log2(prev.err_rho / row.err_rho);
            row.ord_mom = std::log2(prev.err_mom / row.err_mom);
            row.ord_energy = std::log2(prev.err_energy / row.err_energy);
        }
        out.rows.push_back(row);
    }
    return out;
}

// ----------------------------------------------------------------------------
// Speedup study
// ----------------------------------------------------------------------------

struct SpeedupRow {
    int m = 1;
    double requested_fraction = 0.0;
    double achieved_fraction = 0.0;
    RegionCounts counts;
    double ideal = 1.0;       // speedup model at the achieved fraction
    double eval_ratio = 1.0;  // exact, from the ledgers
    double wallclock_ratio = 0.0;
    long mprk_evals = 0, sr_evals = 0;
};

/// Vertically split box runs: for each (m, slow fraction) pair, advances the
/// multirate scheme `steps` steps of dt and its single-rate base m*steps
/// steps of dt/m, then compares exact evaluation counts (and wall clocks)
/// against the speedup model. Wall clocks take the minimum over
/// `timing_reps` repetitions to suppress scheduling noise.
inline std::vector<SpeedupRow> study_speedup(int nx, int ny, int nz_total,
                                             const std::vector<int>& m_list,
                                             const std::vector<double>& fractions,
                                             int buffer_layers, double dt, int steps,
                                             int threads = 1, int timing_reps = 1) {
    std::vector<SpeedupRow> rows;
    for (double frac : fractions) {
        ScenarioConfig cfg =
            make_wind_driven_config(nx, ny, nz_total, 5.0, 10.0, frac, buffer_layers);
        cfg.threads = threads;
        const CoupledDomain dom = build_coupled_domain(cfg.domain);
        const RegionCounts counts =
            region_element_counts(dom.partition, dom.grid1, dom.grid2);
        for (int m : m_list) {
            SpeedupRow row;
            row.m = m;
            row.requested_fraction = frac;
            row.counts = counts;
            row.achieved_fraction =
                static_cast<double>(counts.slow) / static_cast<double>(counts.total());
            row.ideal = serial_speedup(m, row.achieved_fraction);

            const CoupledState st0 = init_scenario(cfg, dom);
            using clock = std::chrono::steady_clock;
            const int reps = std::max(1, timing_reps);

            double wc_mr = 0.0, wc_sr = 0.0;
            RhsEvalLedger ledger_mr, ledger_sr;
            for (int rep = 0; rep < reps; ++rep) {
                CoupledStepper mr(dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(),
                                  cfg.bc_domain2(), threads);
                CoupledState st = st0;
                const auto t0 = clock::now();
                integrate(mr, st, {SchemeKind::Mprk, m}, dt, steps * dt);
                const auto t1 = clock::now();

                CoupledStepper sr(dom, cfg.params1(), cfg.params2(), cfg.bc_domain1(),
                                  cfg.bc_domain2(), threads);
                CoupledState st_sr = st0;
                const auto t2 = clock::now();
                integrate(sr, st_sr, {SchemeKind::Rk2, 1}, dt / m, steps * dt);
                const auto t3 = clock::now();

                const double mr_sec = std::chrono::duration<double>(t1 - t0).count();
                const double sr_sec = std::chrono::duration<double>(t3 - t2).count();
                if (rep == 0 || mr_sec < wc_mr) wc_mr = mr_sec;
                if (rep == 0 || sr_sec < wc_sr) wc_sr = sr_sec;
                ledger_mr = mr.ledger();
                ledger_sr = sr.ledger();
            }

            const RunStamp stamp{"wind3d", steps * dt, counts.total()};
            const MeasuredSpeedup ms =
                measured_speedup(ledger_sr, ledger_mr, stamp, stamp, wc_sr, wc_mr);
            row.eval_ratio = ms.eval_ratio;
            row.wallclock_ratio = ms.wallclock_ratio;
            row.mprk_evals = ledger_mr.total_elements();
            row.sr_evals = ledger_sr.total_elements();
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace mrflow

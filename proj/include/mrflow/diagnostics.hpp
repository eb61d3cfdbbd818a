#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrflow/domain.hpp"
#include "mrflow/ledger.hpp"
#include "mrflow/physics.hpp"

namespace mrflow {

// ----------------------------------------------------------------------------
// Norms
// ----------------------------------------------------------------------------

/// Volume-weighted discrete L2 norm of (a - b) per conserved variable:
/// sqrt(sum_l |K_l| (q_l - q_rl)^2).
inline std::array<double, kVars> l2_error(const ConservedField& a, const ConservedField& b,
                                          const StructuredGrid& g) {
    if (!a.same_shape(b) || a.nx != g.nx || a.ny != g.ny || a.nz != g.nz)
        throw std::invalid_argument("l2_error: fields/grid shape mismatch");
    std::array<double, kVars> acc{};
    const long n = a.cell_count();
    for (long e = 0; e < n; ++e) {
        const double* qa = a.cell(e);
        const double* qb = b.cell(e);
        for (int v = 0; v < kVars; ++v) {
            const double d = qa[v] - qb[v];
            acc[v] += d * d;
        }
    }
    const double vol = g.cell_volume();
    for (int v = 0; v < kVars; ++v) acc[v] = std::sqrt(vol * acc[v]);
    return acc;
}

/// Coupled-run error norms over both domains: density, momentum vector
/// magnitude and total energy.
struct CoupledErrorNorms {
    double rho = 0.0, momentum = 0.0, energy = 0.0;
};

inline CoupledErrorNorms coupled_l2_error(const CoupledState& a, const CoupledState& b,
                                          const StructuredGrid& g1, const StructuredGrid& g2) {
    auto accumulate = [](const ConservedField& fa, const ConservedField& fb, double vol,
                         double acc[3]) {
        const long n = fa.cell_count();
        for (long e = 0; e < n; ++e) {
            const double* qa = fa.cell(e);
            const double* qb = fb.cell(e);
            const double dr = qa[0] - qb[0];
            const double du = qa[1] - qb[1], dv = qa[2] - qb[2], dw = qa[3] - qb[3];
            const double de = qa[4] - qb[4];
            acc[0] += vol * dr * dr;
            acc[1] += vol * (du * du + dv * dv + dw * dw);
            acc[2] += vol * de * de;
        }
    };
    double acc[3] = {0.0, 0.0, 0.0};
    accumulate(a.field1, b.field1, g1.cell_volume(), acc);
    accumulate(a.field2, b.field2, g2.cell_volume(), acc);
    return {std::sqrt(acc[0]), std::sqrt(acc[1]), std::sqrt(acc[2])};
}

// ----------------------------------------------------------------------------
// Conservation history
// ----------------------------------------------------------------------------

inline double total_mass(const ConservedField& f, const StructuredGrid& g) {
    double s = 0.0;
    const long n = f.cell_count();
    for (long e = 0; e < n; ++e) s += f.cell(e)[0];
    return s * g.cell_volume();
}

inline double total_energy(const ConservedField& f, const StructuredGrid& g) {
    double s = 0.0;
    const long n = f.cell_count();
    for (long e = 0; e < n; ++e) s += f.cell(e)[4];
    return s * g.cell_volume();
}

struct ConservationRecord {
    double t = 0.0;
    double mass = 0.0, energy = 0.0;    // both domains
    double mass1 = 0.0, mass2 = 0.0;    // per domain
    double energy1 = 0.0, energy2 = 0.0;
};

/// Time series of total mass and total energy over both domains, recorded
/// from the integrator hook.
struct ConservationHistory {
    std::vector<ConservationRecord> records;

    void record(const CoupledState& st, const StructuredGrid& g1, const StructuredGrid& g2) {
        ConservationRecord r;
        r.t = st.time;
        r.mass1 = total_mass(st.field1, g1);
        r.mass2 = total_mass(st.field2, g2);
        r.energy1 = total_energy(st.field1, g1);
        r.energy2 = total_energy(st.field2, g2);
        r.mass = r.mass1 + r.mass2;
        r.energy = r.energy1 + r.energy2;
        records.push_back(r);
    }

    double max_abs_mass_drift() const {
        double d = 0.0;
        for (const auto& r : records) d = std::max(d, std::fabs(r.mass - records.front().mass));
        return d;
    }
    double max_rel_mass_drift() const {
        return records.empty() ? 0.0 : max_abs_mass_drift() / std::fabs(records.front().mass);
    }
    double max_abs_energy_drift() const {
        double d = 0.0;
        for (const auto& r : records)
            d = std::max(d, std::fabs(r.energy - records.front().energy));
        return d;
    }
};

/// CSV emission: header t,mass,energy,mass_drift,energy_drift, one row per
/// record, full double precision.
inline void write_history_csv(const ConservationHistory& h, std::ostream& os) {
    os << "t,mass,energy,mass_drift,energy_drift\n";
    char line[256];
    for (const auto& r : h.records) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass, r.energy,
                      r.mass - h.records.front().mass, r.energy - h.records.front().energy);
        os << line;
    }
}

inline void write_history_csv(const ConservationHistory& h, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_history_csv(h, os);
}

/// Cr = dt * max over elements of sum_d (|u_d| + a)/dx_d.
inline double courant_number(const ConservedField& f, const StructuredGrid& g,
                             const FluidParams& par, double dt) {
    double cr = 0.0;
    const long n = f.cell_count();
    for (long e = 0; e < n; ++e) {
        const PrimitiveState s = conserved_to_primitive(f.cell(e), par, e);
        const double a = s.sound_speed(par.gamma);
        double sum = (std::fabs(s.u) + a) / g.dx + (std::fabs(s.w) + a) / g.dz;
        if (!g.two_d()) sum += (std::fabs(s.v) + a) / g.dy;
        cr = std::max(cr, sum);
    }
    return dt * cr;
}

// ----------------------------------------------------------------------------
// Speedup model
// ----------------------------------------------------------------------------

/// Ideal speedup of the multirate method over its single-rate base:
/// (1 + (1/m - 1) * slow_fraction)^-1. Independent of the per-element cost
/// and of the base stage count.
inline double ideal_speedup(int m, double slow_fraction) {
    if (m < 1) throw std::invalid_argument("ideal_speedup: m must be >= 1");
    if (slow_fraction < 0.0 || slow_fraction > 1.0)
        throw std::invalid_argument("ideal_speedup: fraction out of [0,1]");
    return 1.0 / (1.0 + (1.0 / m - 1.0) * slow_fraction);
}

/// Element counts of a serial run (or per-process counts of a parallel one).
struct SpeedupInputs {
    int m = 1;
    long n_slow = 0, n_buffer = 0, n_fast = 0;
    long total() const { return n_slow + n_buffer + n_fast; }
    double slow_fraction() const {
        return total() > 0 ? static_cast<double>(n_slow) / static_cast<double>(total()) : 0.0;
    }
};

inline double serial_speedup(const SpeedupInputs& in) {
    return ideal_speedup(in.m, in.slow_fraction());
}
inline double serial_speedup(int m, double slow_fraction) {
    return ideal_speedup(m, slow_fraction);
}

/// Same formula on per-process counts; with one process it falls back to the
/// serial estimate. A process owning no slow elements gets speedup 1.
inline double parallel_speedup(const SpeedupInputs& per_process) {
    return ideal_speedup(per_process.m, per_process.slow_fraction());
}
inline double parallel_speedup(int m, double slow_fraction_per_process) {
    return ideal_speedup(m, slow_fraction_per_process);
}

/// Identifies a run configuration for the measured-speedup equivalence guard.
struct RunStamp {
    std::string scenario;
    double t_end = 0.0;
    long total_cells = 0;
};

struct MeasuredSpeedup {
    double eval_ratio = 1.0;       // exact work ratio from the ledgers
    double wallclock_ratio = 0.0;  // wcr, when timings were supplied
    bool has_wallclock = false;
};

/// Work and wall-clock ratio of a single-rate run over a multirate run of the
/// same configuration. The eval-count ratio is the binding measure; wall
/// clock is best-effort.
inline MeasuredSpeedup measured_speedup(const RhsEvalLedger& single_rate,
                                        const RhsEvalLedger& multirate, const RunStamp& sr_stamp,
                                        const RunStamp& mr_stamp, double wc_single_rate = -1.0,
                                        double wc_multirate = -1.0) {
    if (sr_stamp.scenario != mr_stamp.scenario || sr_stamp.t_end != mr_stamp.t_end ||
        sr_stamp.total_cells != mr_stamp.total_cells)
        throw std::invalid_argument("measured_speedup: runs are not comparable");
    if (multirate.total_elements() <= 0)
        throw std::invalid_argument("measured_speedup: empty multirate ledger");
    MeasuredSpeedup out;
    out.eval_ratio = static_cast<double>(single_rate.total_elements()) /
                     static_cast<double>(multirate.total_elements());
    if (wc_single_rate > 0.0 && wc_multirate > 0.0) {
        out.wallclock_ratio = wc_single_rate / wc_multirate;
        out.has_wallclock = true;
    }
    return out;
}

}  // namespace mrflow

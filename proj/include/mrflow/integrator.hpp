#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mrflow/butcher.hpp"
#include "mrflow/coupling.hpp"
#include "mrflow/domain.hpp"
#include "mrflow/ledger.hpp"
#include "mrflow/spatial.hpp"

namespace mrflow {

namespace detail {
inline void axpy(double coef, const double* x, double* y, std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) y[t] += coef * x[t];
}
}  // namespace detail

/// Multirate stepping engine over the fast / buffer / slow split, plus
/// single-rate drivers on the monolithic coupled system. Owns the per-run
/// scratch storage and the RHS evaluation ledger. The stage loop is
/// sequential; element-level parallelism lives inside the RHS evaluations.
class CoupledStepper {
  public:
    CoupledStepper(const CoupledDomain& dom, const FluidParams& par1, const FluidParams& par2,
                   const BcSpec& bc1, const BcSpec& bc2, int nthreads = 1)
        : ctx_{dom, par1, par2, bc1, bc2, nthreads} {
        if (bc1.z_hi != BcKind::CoupledInterface)
            throw std::invalid_argument("stepper: domain 1 must couple through its z_hi face");
        if (bc2.z_lo != BcKind::CoupledInterface)
            throw std::invalid_argument("stepper: domain 2 must couple through its z_lo face");
        validate_bc_spec(bc1, dom.grid1);
        validate_bc_spec(bc2, dom.grid2);
        bulk_ = bulk_coefficients(par1.mu_tilde, par2.mu_tilde, par1.kappa_tilde(),
                                  par2.kappa_tilde(), dom.grid1.dz, dom.grid2.dz);
    }

    const CoupledRhsContext& context() const { return ctx_; }
    const BulkCoefficients& bulk() const { return bulk_; }
    RhsEvalLedger& ledger() { return ledger_; }
    const RhsEvalLedger& ledger() const { return ledger_; }

    /// Largest seam-stage mismatch |Q^B_i - Q^B_(i mod s)| seen so far in the
    /// buffer layers the slow stencil reads. Stays at machine zero when the
    /// buffer is deep enough.
    double max_seam_mismatch() const { return seam_max_; }
    void reset_seam_check() { seam_max_ = 0.0; }

    /// Interface fluxes of every stage of the most recent step, for
    /// conservation audits.
    const std::vector<InterfaceFluxes>& last_step_interface_fluxes() const { return stage_iface_; }

    /// One multirate step of size dt: for each of the m*s global stages,
    /// update the buffer stage value, update (i < s) or copy (i >= s) the
    /// slow stage value, update the fast stage value, exchange interface
    /// data, then evaluate the buffer, slow (i < s only) and fast tendencies.
    void mprk_step(CoupledState& state, const MprkTableauSet& tb, double dt) {
        const int s = tb.s, ms = tb.m * tb.s;
        const StructuredGrid& g1 = ctx_.dom.grid1;
        const StructuredGrid& g2 = ctx_.dom.grid2;
        const std::size_t n1 = state.field1.data.size();
        const std::size_t n2 = state.field2.data.size();
        const long plane2 = static_cast<long>(g2.nx) * g2.ny;
        const int nb = ctx_.dom.partition.buffer_layers;
        const std::size_t buf_end = static_cast<std::size_t>(kVars) * plane2 * nb;
        const int seam_layers = std::min(2, nb);
        const std::size_t seam_lo = static_cast<std::size_t>(kVars) * plane2 * (nb - seam_layers);

        ensure_stage_storage(ms, n1, n2);
        slow_saved_.assign(s, std::vector<double>());
        seam_saved_.assign(s, std::vector<double>());
        stage_iface_.assign(ms, InterfaceFluxes{});
        if (q1s_.data.size() != n1) q1s_ = state.field1;
        if (q2s_.data.size() != n2) q2s_ = state.field2;

        const std::vector<double>& q1n = state.field1.data;
        const std::vector<double>& q2n = state.field2.data;

        for (int i = 0; i < ms; ++i) {
            // buffer stage value
            std::memcpy(q2s_.data.data(), q2n.data(), buf_end * sizeof(double));
            for (int j = 0; j < i; ++j) {
                const double a = tb.buffer.aat(i, j);
                if (a != 0.0) detail::axpy(dt * a, r2_[j].data(), q2s_.data.data(), 0, buf_end);
            }
            // slow stage value: combine for the first s stages, copy after
            if (i < s) {
                std::memcpy(q2s_.data.data() + buf_end, q2n.data() + buf_end,
                            (n2 - buf_end) * sizeof(double));
                for (int j = 0; j < i; ++j) {
                    const double a = tb.slow.aat(i, j);
                    if (a != 0.0)
                        detail::axpy(dt * a, r2_[j].data(), q2s_.data.data(), buf_end, n2);
                }
                slow_saved_[i].assign(q2s_.data.begin() + buf_end, q2s_.data.end());
                seam_saved_[i].assign(q2s_.data.begin() + seam_lo, q2s_.data.begin() + buf_end);
            } else {
                std::memcpy(q2s_.data.data() + buf_end, slow_saved_[i % s].data(),
                            (n2 - buf_end) * sizeof(double));
                double d = 0.0;
                const std::vector<double>& ref = seam_saved_[i % s];
                for (std::size_t t = 0; t < ref.size(); ++t)
                    d = std::max(d, std::fabs(q2s_.data[seam_lo + t] - ref[t]));
                seam_max_ = std::max(seam_max_, d);
            }
            // fast stage value
            std::memcpy(q1s_.data.data(), q1n.data(), n1 * sizeof(double));
            for (int j = 0; j < i; ++j) {
                const double a = tb.fast.aat(i, j);
                if (a != 0.0) detail::axpy(dt * a, r1_[j].data(), q1s_.data.data(), 0, n1);
            }

            try {
                stage_iface_[i] = exchange_interface_data(i, i, q1s_, g1, ctx_.par1, q2s_, g2,
                                                          ctx_.par2, bulk_);

                rhs_region(Region::Buffer, ctx_, q1s_, q2s_, &stage_iface_[i], scratch2_, r2_[i],
                           &ledger_);
                if (i < s)
                    rhs_region(Region::Slow, ctx_, q1s_, q2s_, &stage_iface_[i], scratch2_,
                               r2_[i], &ledger_);
                rhs_region(Region::Fast, ctx_, q1s_, q2s_, &stage_iface_[i], scratch1_, r1_[i],
                           &ledger_);
            } catch (const NonPhysicalState& e) {
                throw NonPhysicalState(std::string(e.what()) + " (stage " + std::to_string(i + 1) +
                                           " of " + std::to_string(ms) + ")",
                                       e.cell);
            }
        }

        // step completion
        for (int i = 0; i < ms; ++i) {
            const double bf = tb.fast.b[i];
            if (bf != 0.0) detail::axpy(dt * bf, r1_[i].data(), state.field1.data.data(), 0, n1);
            const double bb = tb.buffer.b[i];
            if (bb != 0.0)
                detail::axpy(dt * bb, r2_[i].data(), state.field2.data.data(), 0, buf_end);
            if (i < s) {
                const double bs = tb.slow.b[i];
                if (bs != 0.0)
                    detail::axpy(dt * bs, r2_[i].data(), state.field2.data.data(), buf_end, n2);
            }
        }
        state.time += dt;
    }

    /// One explicit RK step on the monolithic coupled system, interface data
    /// exchanged at every stage.
    void single_rate_step(CoupledState& state, const ButcherTableau& tb, double dt) {
        const int s = tb.stages;
        const StructuredGrid& g1 = ctx_.dom.grid1;
        const StructuredGrid& g2 = ctx_.dom.grid2;
        const std::size_t n1 = state.field1.data.size();
        const std::size_t n2 = state.field2.data.size();

        ensure_stage_storage(s, n1, n2);
        stage_iface_.assign(s, InterfaceFluxes{});
        if (q1s_.data.size() != n1) q1s_ = state.field1;
        if (q2s_.data.size() != n2) q2s_ = state.field2;

        for (int i = 0; i < s; ++i) {
            std::memcpy(q1s_.data.data(), state.field1.data.data(), n1 * sizeof(double));
            std::memcpy(q2s_.data.data(), state.field2.data.data(), n2 * sizeof(double));
            for (int j = 0; j < i; ++j) {
                const double a = tb.aat(i, j);
                if (a == 0.0) continue;
                detail::axpy(dt * a, r1_[j].data(), q1s_.data.data(), 0, n1);
                detail::axpy(dt * a, r2_[j].data(), q2s_.data.data(), 0, n2);
            }
            stage_iface_[i] = exchange_interface_data(i, i, q1s_, g1, ctx_.par1, q2s_, g2,
                                                      ctx_.par2, bulk_);
            rhs_region(Region::Buffer, ctx_, q1s_, q2s_, &stage_iface_[i], scratch2_, r2_[i],
                       &ledger_);
            rhs_region(Region::Slow, ctx_, q1s_, q2s_, &stage_iface_[i], scratch2_, r2_[i],
                       &ledger_);
            rhs_region(Region::Fast, ctx_, q1s_, q2s_, &stage_iface_[i], scratch1_, r1_[i],
                       &ledger_);
        }
        for (int i = 0; i < s; ++i) {
            const double b = tb.b[i];
            if (b == 0.0) continue;
            detail::axpy(dt * b, r1_[i].data(), state.field1.data.data(), 0, n1);
            detail::axpy(dt * b, r2_[i].data(), state.field2.data.data(), 0, n2);
        }
        state.time += dt;
    }

  private:
    void ensure_stage_storage(int stages, std::size_t n1, std::size_t n2) {
        r1_.resize(stages);
        r2_.resize(stages);
        for (auto& r : r1_) r.assign(n1, 0.0);
        for (auto& r : r2_) r.assign(n2, 0.0);
    }

    CoupledRhsContext ctx_;
    BulkCoefficients bulk_;
    RhsEvalLedger ledger_;
    RhsScratch scratch1_, scratch2_;
    std::vector<std::vector<double>> r1_, r2_;
    ConservedField q1s_, q2s_;
    std::vector<std::vector<double>> slow_saved_, seam_saved_;
    std::vector<InterfaceFluxes> stage_iface_;
    double seam_max_ = 0.0;
};

enum class SchemeKind { Mprk, Rk2, Rk4Ref };

struct Scheme {
    SchemeKind kind = SchemeKind::Mprk;
    int m = 2;  // rate ratio, used by Mprk only
};

struct IntegrateHooks {
    int cadence = 1;  // steps between records; <= 1 records every step
    std::function<void(const CoupledState&, long step)> on_record;
};

/// Advances the state with fixed dt to t_end, truncating the final step to
/// land on t_end exactly. Hooks fire at t = start, every `cadence` steps and
/// at the final step. Returns the number of steps taken.
inline long integrate(CoupledStepper& stepper, CoupledState& state, Scheme scheme, double dt,
                      double t_end, const IntegrateHooks& hooks = {}) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    if (t_end < state.time) throw std::invalid_argument("integrate: t_end before current time");

    MprkTableauSet mprk;
    ButcherTableau single;
    switch (scheme.kind) {
        case SchemeKind::Mprk: mprk = generate_mprk(base_rk2(), scheme.m); break;
        case SchemeKind::Rk2: single = base_rk2(); break;
        case SchemeKind::Rk4Ref: single = classic_rk4(); break;
    }

    const int cadence = std::max(1, hooks.cadence);
    auto record = [&](long step) {
        if (hooks.on_record) hooks.on_record(state, step);
    };

    record(0);
    long step = 0;
    while (state.time < t_end - 0.5 * dt * 1e-12) {
        const double remaining = t_end - state.time;
        const double h = (remaining < dt * (1.0 + 1e-12)) ? remaining : dt;
        try {
            if (scheme.kind == SchemeKind::Mprk)
                stepper.mprk_step(state, mprk, h);
            else
                stepper.single_rate_step(state, single, h);
        } catch (const NonPhysicalState& e) {
            throw NonPhysicalState(std::string(e.what()) + " (step " + std::to_string(step + 1) +
                                       ", t=" + std::to_string(state.time) + ")",
                                   e.cell);
        }
        ++step;
        const bool last = !(state.time < t_end - 0.5 * dt * 1e-12);
        if (last) state.time = t_end;
        if (step % cadence == 0 || last) record(step);
    }
    return step;
}

}  // namespace mrflow

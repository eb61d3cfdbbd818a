#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mrflow/coupling.hpp"
#include "mrflow/domain.hpp"
#include "mrflow/ledger.hpp"
#include "mrflow/parallel.hpp"
#include "mrflow/physics.hpp"

namespace mrflow {

enum class BcKind { AdiabaticNoSlipWall, Periodic, CoupledInterface };

/// Boundary condition per face of the domain box. y entries are ignored for
/// ny == 1 grids (2D mode disables the y direction entirely).
struct BcSpec {
    BcKind x_lo = BcKind::AdiabaticNoSlipWall, x_hi = BcKind::AdiabaticNoSlipWall;
    BcKind y_lo = BcKind::AdiabaticNoSlipWall, y_hi = BcKind::AdiabaticNoSlipWall;
    BcKind z_lo = BcKind::AdiabaticNoSlipWall, z_hi = BcKind::AdiabaticNoSlipWall;

    BcKind lo(int axis) const { return axis == 0 ? x_lo : (axis == 1 ? y_lo : z_lo); }
    BcKind hi(int axis) const { return axis == 0 ? x_hi : (axis == 1 ? y_hi : z_hi); }
    bool periodic(int axis) const { return lo(axis) == BcKind::Periodic; }
};

inline void validate_bc_spec(const BcSpec& bc, const StructuredGrid& g) {
    const char* axes = "xyz";
    const int counts[3] = {g.nx, g.ny, g.nz};
    for (int d = 0; d < 3; ++d) {
        if (d == 1 && g.two_d()) continue;
        const bool plo = bc.lo(d) == BcKind::Periodic;
        const bool phi = bc.hi(d) == BcKind::Periodic;
        if (plo != phi)
            throw std::invalid_argument(std::string("bc: periodic on only one ") + axes[d] +
                                        " face");
        if (plo && counts[d] < 3)
            throw std::invalid_argument(std::string("bc: periodic ") + axes[d] +
                                        " direction needs at least 3 elements");
        if (d != 2 && (bc.lo(d) == BcKind::CoupledInterface || bc.hi(d) == BcKind::CoupledInterface))
            throw std::invalid_argument("bc: coupled interface is only supported on z faces");
    }
    if (bc.z_lo == BcKind::CoupledInterface && bc.z_hi == BcKind::CoupledInterface)
        throw std::invalid_argument("bc: a domain cannot have two coupled interfaces");
}

/// Per-element least-squares gradients: conserved variables (5x3), velocity
/// (3x3) and temperature (3). Exact for globally linear fields on interior
/// elements.
struct GradientField {
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> cons;  // 15 per cell, [var*3 + dir]
    std::vector<double> vel;   // 9 per cell, [comp*3 + dir]
    std::vector<double> temp;  // 3 per cell

    void resize(const StructuredGrid& g) {
        if (nx == g.nx && ny == g.ny && nz == g.nz) return;
        nx = g.nx; ny = g.ny; nz = g.nz;
        const std::size_t n = static_cast<std::size_t>(g.cell_count());
        cons.assign(15 * n, 0.0);
        vel.assign(9 * n, 0.0);
        temp.assign(3 * n, 0.0);
    }
};

/// Shared per-face numerical fluxes. Interior faces hold exactly one stored
/// flux used with opposite signs by the two adjacent elements.
struct FaceFluxSet {
    std::vector<double> fx, fy, fz;
};

struct RhsScratch {
    std::vector<double> prim;  // 6 per cell: rho, u, v, w, p, T
    GradientField grads;
    FaceFluxSet faces;
};

// ----------------------------------------------------------------------------
// Pointwise helpers
// ----------------------------------------------------------------------------

/// Ghost state of an adiabatic no-slip wall: velocity negated, density and
/// total energy (hence pressure and temperature) copied.
inline void wall_mirror(const double q[kVars], double out[kVars]) {
    out[0] = q[0];
    out[1] = -q[1];
    out[2] = -q[2];
    out[3] = -q[3];
    out[4] = q[4];
}

/// Left/right face states from linear reconstruction of the two adjacent
/// cells. gl/gr are 15-entry conserved-gradient blocks, h the cell size
/// along `axis`.
inline void linear_face_pair(const double* ql_cell, const double* gl, const double* qr_cell,
                             const double* gr, int axis, double h, double ql[kVars],
                             double qr[kVars]) {
    const double half = 0.5 * h;
    for (int v = 0; v < kVars; ++v) {
        ql[v] = ql_cell[v] + gl[v * 3 + axis] * half;
        qr[v] = qr_cell[v] - gr[v * 3 + axis] * half;
    }
}

/// sqrt(rho)-weighted average state used to bound the dissipation coefficient.
inline PrimitiveState roe_average_prim(const PrimitiveState& sl, const PrimitiveState& sr,
                                       const FluidParams& par) {
    const double wl = std::sqrt(sl.rho), wr = std::sqrt(sr.rho);
    const double inv = 1.0 / (wl + wr);
    PrimitiveState m;
    m.rho = wl * wr;
    m.u = (wl * sl.u + wr * sr.u) * inv;
    m.v = (wl * sl.v + wr * sr.v) * inv;
    m.w = (wl * sl.w + wr * sr.w) * inv;
    const double H = (wl * sl.total_enthalpy(par.gamma) + wr * sr.total_enthalpy(par.gamma)) * inv;
    const double a2 =
        (par.gamma - 1.0) * (H - 0.5 * (m.u * m.u + m.v * m.v + m.w * m.w));
    if (!(a2 > 0.0)) throw NonPhysicalState("roe average: non-positive sound speed");
    m.T = a2;  // nondimensional identity a^2 = T
    m.p = m.rho * a2 / par.gamma;
    return m;
}

inline PrimitiveState roe_average(const double ql[kVars], const double qr[kVars],
                                  const FluidParams& par) {
    return roe_average_prim(conserved_to_primitive(ql, par), conserved_to_primitive(qr, par), par);
}

namespace detail {
inline void flux_dot_n(const PrimitiveState& s, const double q[kVars], const double n[3],
                       double out[kVars]) {
    const double un = s.u * n[0] + s.v * n[1] + s.w * n[2];
    out[0] = s.rho * un;
    out[1] = q[1] * un + s.p * n[0];
    out[2] = q[2] * un + s.p * n[1];
    out[3] = q[3] * un + s.p * n[2];
    out[4] = (q[4] + s.p) * un;
}
}  // namespace detail

/// Local Lax-Friedrichs flux through a face with unit normal n pointing from
/// the left to the right state. lambda is the largest spectral radius over
/// the left, right and Roe-averaged states.
inline void lax_friedrichs_flux(const double ql[kVars], const double qr[kVars], const double n[3],
                                const FluidParams& par, double out[kVars]) {
    const PrimitiveState sl = conserved_to_primitive(ql, par);
    const PrimitiveState sr = conserved_to_primitive(qr, par);
    const PrimitiveState sm = roe_average_prim(sl, sr, par);
    auto rad = [&](const PrimitiveState& s) {
        const double un = s.u * n[0] + s.v * n[1] + s.w * n[2];
        return std::fabs(un) + s.sound_speed(par.gamma);
    };
    const double lam = std::max({rad(sl), rad(sr), rad(sm)});
    double fl[kVars], fr[kVars];
    detail::flux_dot_n(sl, ql, n, fl);
    detail::flux_dot_n(sr, qr, n, fr);
    for (int v = 0; v < kVars; ++v)
        out[v] = 0.5 * (fl[v] + fr[v]) + 0.5 * lam * (ql[v] - qr[v]);
}

/// Viscous flux through an interior face along `axis` from the common states:
/// arithmetic-average velocity, compact normal gradients, averaged tangential
/// gradients.
inline void viscous_face_flux(const double* prim_l, const double* prim_r, const double* gvel_l,
                              const double* gvel_r, const double* gt_l, const double* gt_r,
                              double h, int axis, const FluidParams& par, double out[kVars]) {
    double vel[3], gv[9], gt[3];
    const double inv_h = 1.0 / h;
    for (int c = 0; c < 3; ++c) {
        vel[c] = 0.5 * (prim_l[1 + c] + prim_r[1 + c]);
        for (int d = 0; d < 3; ++d)
            gv[c * 3 + d] = (d == axis) ? (prim_r[1 + c] - prim_l[1 + c]) * inv_h
                                        : 0.5 * (gvel_l[c * 3 + d] + gvel_r[c * 3 + d]);
    }
    for (int d = 0; d < 3; ++d)
        gt[d] = (d == axis) ? (prim_r[5] - prim_l[5]) * inv_h : 0.5 * (gt_l[d] + gt_r[d]);
    viscous_flux(vel, gv, gt, par, axis, out);
}

/// Viscous flux at an adiabatic no-slip wall face. `outward` is +1 when the
/// wall is on the high side of the interior cell, -1 on the low side. The
/// common velocity is zero and the normal temperature gradient vanishes, so
/// the energy row is exactly zero.
inline void wall_viscous_flux(const double* prim_cell, const double* gt_cell, double h, int axis,
                              int outward, const FluidParams& par, double out[kVars]) {
    double vel[3] = {0.0, 0.0, 0.0};
    double gv[9] = {0.0};
    double gt[3];
    for (int c = 0; c < 3; ++c) gv[c * 3 + axis] = -2.0 * outward * prim_cell[1 + c] / h;
    for (int d = 0; d < 3; ++d) gt[d] = (d == axis) ? 0.0 : gt_cell[d];
    viscous_flux(vel, gv, gt, par, axis, out);
}

// ----------------------------------------------------------------------------
// Grid-level operators
// ----------------------------------------------------------------------------

/// Primitive decode (rho, u, v, w, p, T) for all cells with k in [k0, k1).
inline void cell_primitives(const ConservedField& q, const StructuredGrid& g,
                            const FluidParams& par, int k0, int k1, std::vector<double>& prim,
                            int nthreads) {
    prim.resize(6 * static_cast<std::size_t>(g.cell_count()));
    const long plane = static_cast<long>(g.nx) * g.ny;
    parallel_for(k1 - k0, nthreads, [&](long klo, long khi) {
        for (long kk = klo; kk < khi; ++kk) {
            const int k = k0 + static_cast<int>(kk);
            for (long e = plane * k; e < plane * (k + 1); ++e) {
                const PrimitiveState s = conserved_to_primitive(q.cell(e), par, e);
                double* p = prim.data() + 6 * e;
                p[0] = s.rho; p[1] = s.u; p[2] = s.v; p[3] = s.w; p[4] = s.p; p[5] = s.T;
            }
        }
    });
}

namespace detail {

/// Three-point stencil (indices and weights) for the derivative along `axis`
/// at position m: central differences on interior and periodic cells,
/// second-order one-sided at physical boundaries.
struct DiffStencil {
    int m0 = 0, m1 = 0, m2 = 0;
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    bool active = false;
};

inline DiffStencil diff_stencil(int m, int n, double h, bool periodic) {
    DiffStencil s;
    if (n < 2) return s;
    s.active = true;
    const double inv2h = 1.0 / (2.0 * h);
    if (periodic) {
        s.m0 = (m == 0) ? n - 1 : m - 1;
        s.m1 = (m == n - 1) ? 0 : m + 1;
        s.m2 = s.m0;
        s.c0 = -inv2h; s.c1 = inv2h; s.c2 = 0.0;
        return s;
    }
    if (n == 2) {
        s.m0 = 0; s.m1 = 1; s.m2 = 0;
        s.c0 = -1.0 / h; s.c1 = 1.0 / h; s.c2 = 0.0;
        return s;
    }
    if (m == 0) {
        s.m0 = 0; s.m1 = 1; s.m2 = 2;
        s.c0 = -3.0 * inv2h; s.c1 = 4.0 * inv2h; s.c2 = -inv2h;
    } else if (m == n - 1) {
        s.m0 = n - 1; s.m1 = n - 2; s.m2 = n - 3;
        s.c0 = 3.0 * inv2h; s.c1 = -4.0 * inv2h; s.c2 = inv2h;
    } else {
        s.m0 = m - 1; s.m1 = m + 1; s.m2 = m - 1;
        s.c0 = -inv2h; s.c1 = inv2h; s.c2 = 0.0;
    }
    return s;
}

}  // namespace detail

/// Cell-centered gradients of conserved variables, velocity and temperature
/// for all cells with k in [k0, k1).
inline void ls_gradients(const ConservedField& q, const std::vector<double>& prim,
                         const StructuredGrid& g, const BcSpec& bc, int k0, int k1,
                         GradientField& grads, int nthreads) {
    grads.resize(g);
    parallel_for(k1 - k0, nthreads, [&](long klo, long khi) {
        for (long kk = klo; kk < khi; ++kk) {
            const int k = k0 + static_cast<int>(kk);
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    const long e = g.index(i, j, k);
                    double* gc = grads.cons.data() + 15 * e;
                    double* gv = grads.vel.data() + 9 * e;
                    double* gt = grads.temp.data() + 3 * e;
                    for (int d = 0; d < 3; ++d) {
                        const int pos[3] = {i, j, k};
                        const int n[3] = {g.nx, g.ny, g.nz};
                        const double h[3] = {g.dx, g.dy, g.dz};
                        detail::DiffStencil st;
                        if (!(d == 1 && g.two_d()))
                            st = detail::diff_stencil(pos[d], n[d], h[d], bc.periodic(d));
                        if (!st.active) {
                            for (int v = 0; v < kVars; ++v) gc[v * 3 + d] = 0.0;
                            for (int c = 0; c < 3; ++c) gv[c * 3 + d] = 0.0;
                            gt[d] = 0.0;
                            continue;
                        }
                        int ijk0[3] = {i, j, k}, ijk1[3] = {i, j, k}, ijk2[3] = {i, j, k};
                        ijk0[d] = st.m0; ijk1[d] = st.m1; ijk2[d] = st.m2;
                        const long e0 = g.index(ijk0[0], ijk0[1], ijk0[2]);
                        const long e1 = g.index(ijk1[0], ijk1[1], ijk1[2]);
                        const long e2 = g.index(ijk2[0], ijk2[1], ijk2[2]);
                        const double* q0 = q.cell(e0);
                        const double* q1 = q.cell(e1);
                        const double* q2 = q.cell(e2);
                        for (int v = 0; v < kVars; ++v)
                            gc[v * 3 + d] = st.c0 * q0[v] + st.c1 * q1[v] + st.c2 * q2[v];
                        const double* p0 = prim.data() + 6 * e0;
                        const double* p1 = prim.data() + 6 * e1;
                        const double* p2 = prim.data() + 6 * e2;
                        for (int c = 0; c < 3; ++c)
                            gv[c * 3 + d] =
                                st.c0 * p0[1 + c] + st.c1 * p1[1 + c] + st.c2 * p2[1 + c];
                        gt[d] = st.c0 * p0[5] + st.c1 * p1[5] + st.c2 * p2[5];
                    }
                }
            }
        }
    });
}

namespace detail {

struct SweepContext {
    const ConservedField* q;
    const StructuredGrid* g;
    const FluidParams* par;
    const BcSpec* bc;
    const InterfaceFluxes* iface;
    const std::vector<double>* prim;
    const GradientField* grads;
};

/// Numerical flux through one face along `axis`. cl/cr are the adjacent cell
/// indices (cl < 0: low-side boundary face; cr < 0: high-side boundary face
/// with the boundary kind in `kind`). Periodic faces arrive here as interior
/// faces with wrapped neighbors.
inline void face_flux(const SweepContext& cx, int axis, long cl, long cr, BcKind kind,
                      int iface_face, double h, double out[kVars]) {
    const double n[3] = {axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0, axis == 2 ? 1.0 : 0.0};
    double ql[kVars], qr[kVars];
    const bool lo_boundary = cl < 0, hi_boundary = cr < 0;

    if (!lo_boundary && !hi_boundary) {
        linear_face_pair(cx.q->cell(cl), cx.grads->cons.data() + 15 * cl, cx.q->cell(cr),
                         cx.grads->cons.data() + 15 * cr, axis, h, ql, qr);
        double fv[kVars];
        lax_friedrichs_flux(ql, qr, n, *cx.par, out);
        viscous_face_flux(cx.prim->data() + 6 * cl, cx.prim->data() + 6 * cr,
                          cx.grads->vel.data() + 9 * cl, cx.grads->vel.data() + 9 * cr,
                          cx.grads->temp.data() + 3 * cl, cx.grads->temp.data() + 3 * cr, h, axis,
                          *cx.par, fv);
        for (int v = 0; v < kVars; ++v) out[v] -= fv[v];
        return;
    }

    const long cell = lo_boundary ? cr : cl;
    const int outward = lo_boundary ? -1 : +1;
    const double* gc = cx.grads->cons.data() + 15 * cell;
    // own-side reconstruction toward the boundary face
    double qf[kVars];
    for (int v = 0; v < kVars; ++v)
        qf[v] = cx.q->cell(cell)[v] + outward * gc[v * 3 + axis] * 0.5 * h;

    if (kind == BcKind::CoupledInterface) {
        const PrimitiveState s = conserved_to_primitive(qf, *cx.par, cell);
        const InterfaceFluxes& f = *cx.iface;
        const double sxz = f.sigma_xz[iface_face];
        const double syz = f.sigma_yz[iface_face];
        const double piz = f.pi_z[iface_face];
        const double uw = f.u_wall[iface_face], vw = f.v_wall[iface_face];
        // rigid lid: pressure-only inviscid row, shared bulk viscous fluxes
        out[0] = 0.0;
        out[1] = -sxz;
        out[2] = -syz;
        out[3] = s.p;
        out[4] = -(uw * sxz + vw * syz - piz);
        return;
    }

    // adiabatic no-slip wall: mirror face state, wall viscous flux
    double qm[kVars];
    wall_mirror(qf, qm);
    if (lo_boundary)
        lax_friedrichs_flux(qm, qf, n, *cx.par, out);
    else
        lax_friedrichs_flux(qf, qm, n, *cx.par, out);
    double fv[kVars];
    wall_viscous_flux(cx.prim->data() + 6 * cell, cx.grads->temp.data() + 3 * cell, h, axis,
                      outward, *cx.par, fv);
    for (int v = 0; v < kVars; ++v) out[v] -= fv[v];
}

}  // namespace detail

/// Second-order finite-volume tendency (-flux divergence + source) for cells
/// with k in [k0, k1). Faces on the cut planes k0 and k1 are evaluated from
/// the field exactly as interior faces, which is what makes a region-split
/// evaluation identical to the monolithic one. `rhs` must hold 5 entries per
/// cell of the full grid; only the [k0, k1) range is written.
inline void compute_rhs(const ConservedField& q, const StructuredGrid& g, const FluidParams& par,
                        const BcSpec& bc, const InterfaceFluxes* iface, int k0, int k1,
                        RhsScratch& ws, std::vector<double>& rhs, int nthreads) {
    validate_bc_spec(bc, g);
    if (k0 < 0 || k1 > g.nz || k0 >= k1)
        throw std::invalid_argument("compute_rhs: bad z range");
    const bool touches_iface = (k0 == 0 && bc.z_lo == BcKind::CoupledInterface) ||
                               (k1 == g.nz && bc.z_hi == BcKind::CoupledInterface);
    if (touches_iface && iface == nullptr)
        throw std::invalid_argument("compute_rhs: interface data missing");
    if (touches_iface && (iface->nx != g.nx || iface->ny != g.ny))
        throw std::invalid_argument("compute_rhs: interface data shape mismatch");
    rhs.resize(static_cast<std::size_t>(kVars) * g.cell_count());

    const int kp0 = std::max(0, k0 - 2), kp1 = std::min(g.nz, k1 + 2);
    cell_primitives(q, g, par, kp0, kp1, ws.prim, nthreads);
    const int kg0 = std::max(0, k0 - 1), kg1 = std::min(g.nz, k1 + 1);
    ls_gradients(q, ws.prim, g, bc, kg0, kg1, ws.grads, nthreads);

    detail::SweepContext cx{&q, &g, &par, &bc, iface, &ws.prim, &ws.grads};
    const int nzr = k1 - k0;
    const long planes = static_cast<long>(g.nx) * g.ny;

    // x faces
    ws.faces.fx.resize(static_cast<std::size_t>(kVars) * (g.nx + 1) * g.ny * nzr);
    parallel_for(nzr, nthreads, [&](long klo, long khi) {
        for (long kk = klo; kk < khi; ++kk) {
            const int k = k0 + static_cast<int>(kk);
            for (int j = 0; j < g.ny; ++j) {
                for (int fi = 0; fi <= g.nx; ++fi) {
                    long cl = fi - 1 >= 0 ? g.index(fi - 1, j, k) : -1;
                    long cr = fi < g.nx ? g.index(fi, j, k) : -1;
                    BcKind kind = fi == 0 ? bc.x_lo : bc.x_hi;
                    if (bc.periodic(0)) {
                        if (fi == 0) cl = g.index(g.nx - 1, j, k);
                        if (fi == g.nx) cr = g.index(0, j, k);
                    }
                    double* f = ws.faces.fx.data() +
                                kVars * (fi + static_cast<long>(g.nx + 1) * (j + static_cast<long>(g.ny) * kk));
                    detail::face_flux(cx, 0, cl, cr, kind, 0, g.dx, f);
                }
            }
        }
    });

    // y faces (3D only)
    if (!g.two_d()) {
        ws.faces.fy.resize(static_cast<std::size_t>(kVars) * g.nx * (g.ny + 1) * nzr);
        parallel_for(nzr, nthreads, [&](long klo, long khi) {
            for (long kk = klo; kk < khi; ++kk) {
                const int k = k0 + static_cast<int>(kk);
                for (int fj = 0; fj <= g.ny; ++fj) {
                    for (int i = 0; i < g.nx; ++i) {
                        long cl = fj - 1 >= 0 ? g.index(i, fj - 1, k) : -1;
                        long cr = fj < g.ny ? g.index(i, fj, k) : -1;
                        BcKind kind = fj == 0 ? bc.y_lo : bc.y_hi;
                        if (bc.periodic(1)) {
                            if (fj == 0) cl = g.index(i, g.ny - 1, k);
                            if (fj == g.ny) cr = g.index(i, 0, k);
                        }
                        double* f = ws.faces.fy.data() +
                                    kVars * (i + static_cast<long>(g.nx) * (fj + static_cast<long>(g.ny + 1) * kk));
                        detail::face_flux(cx, 1, cl, cr, kind, 0, g.dy, f);
                    }
                }
            }
        });
    }

    // z faces (planes k0 .. k1)
    ws.faces.fz.resize(static_cast<std::size_t>(kVars) * planes * (nzr + 1));
    parallel_for(nzr + 1, nthreads, [&](long plo, long phi) {
        for (long pp = plo; pp < phi; ++pp) {
            const int fk = k0 + static_cast<int>(pp);
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    long cl = fk - 1 >= 0 ? g.index(i, j, fk - 1) : -1;
                    long cr = fk < g.nz ? g.index(i, j, fk) : -1;
                    BcKind kind = fk == 0 ? bc.z_lo : bc.z_hi;
                    if (bc.periodic(2)) {
                        if (fk == 0) cl = g.index(i, j, g.nz - 1);
                        if (fk == g.nz) cr = g.index(i, j, 0);
                    }
                    double* f = ws.faces.fz.data() +
                                kVars * (i + static_cast<long>(g.nx) * (j + static_cast<long>(g.ny) * pp));
                    const int face2d = i + g.nx * j;
                    detail::face_flux(cx, 2, cl, cr, kind, face2d, g.dz, f);
                }
            }
        }
    });

    // divergence + source
    const double inv_dx = 1.0 / g.dx, inv_dy = 1.0 / g.dy, inv_dz = 1.0 / g.dz;
    parallel_for(nzr, nthreads, [&](long klo, long khi) {
        for (long kk = klo; kk < khi; ++kk) {
            const int k = k0 + static_cast<int>(kk);
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    const long e = g.index(i, j, k);
                    const double* fxl = ws.faces.fx.data() +
                        kVars * (i + static_cast<long>(g.nx + 1) * (j + static_cast<long>(g.ny) * kk));
                    const double* fxr = fxl + kVars;
                    const double* fzl = ws.faces.fz.data() +
                        kVars * (i + static_cast<long>(g.nx) * (j + static_cast<long>(g.ny) * kk));
                    const double* fzr = fzl + kVars * planes;
                    double src[kVars];
                    gravity_source(q.cell(e), par, src);
                    double* out = rhs.data() + kVars * e;
                    if (!g.two_d()) {
                        const double* fyl = ws.faces.fy.data() +
                            kVars * (i + static_cast<long>(g.nx) * (j + static_cast<long>(g.ny + 1) * kk));
                        const double* fyr = fyl + kVars * g.nx;
                        for (int v = 0; v < kVars; ++v)
                            out[v] = -(fxr[v] - fxl[v]) * inv_dx - (fyr[v] - fyl[v]) * inv_dy -
                                     (fzr[v] - fzl[v]) * inv_dz + src[v];
                    } else {
                        for (int v = 0; v < kVars; ++v)
                            out[v] = -(fxr[v] - fxl[v]) * inv_dx - (fzr[v] - fzl[v]) * inv_dz + src[v];
                    }
                }
            }
        }
    });
}

// ----------------------------------------------------------------------------
// Region-level right-hand sides
// ----------------------------------------------------------------------------

enum class Region { Fast, Buffer, Slow };

/// Everything a region evaluation needs besides the stage fields.
struct CoupledRhsContext {
    CoupledDomain dom;
    FluidParams par1, par2;
    BcSpec bc1, bc2;
    int nthreads = 1;
};

/// Tendency of one region given the current stage fields of both domains.
/// Fast writes 5 values per grid-1 cell into rhs; Buffer/Slow write their
/// z-layer range of grid 2. Seam faces inside grid 2 use the supplied
/// neighbor-region stage state exactly as interior faces. Each call
/// increments the ledger by the region's element count.
inline void rhs_region(Region region, const CoupledRhsContext& cx, const ConservedField& f1,
                       const ConservedField& f2, const InterfaceFluxes* iface, RhsScratch& ws,
                       std::vector<double>& rhs, RhsEvalLedger* ledger) {
    const RegionPartition& part = cx.dom.partition;
    switch (region) {
        case Region::Fast:
            compute_rhs(f1, cx.dom.grid1, cx.par1, cx.bc1, iface, 0, cx.dom.grid1.nz, ws, rhs,
                        cx.nthreads);
            if (ledger) ledger->record_fast(cx.dom.grid1.cell_count());
            break;
        case Region::Buffer:
            compute_rhs(f2, cx.dom.grid2, cx.par2, cx.bc2, iface, 0, part.buffer_layers, ws, rhs,
                        cx.nthreads);
            if (ledger)
                ledger->record_buffer(static_cast<long>(cx.dom.grid2.nx) * cx.dom.grid2.ny *
                                      part.buffer_layers);
            break;
        case Region::Slow:
            compute_rhs(f2, cx.dom.grid2, cx.par2, cx.bc2, iface, part.buffer_layers,
                        cx.dom.grid2.nz, ws, rhs, cx.nthreads);
            if (ledger)
                ledger->record_slow(static_cast<long>(cx.dom.grid2.nx) * cx.dom.grid2.ny *
                                    part.slow_layers);
            break;
    }
}

}  // namespace mrflow

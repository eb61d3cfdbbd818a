#pragma once

#include <stdexcept>
#include <vector>

#include "mrflow/domain.hpp"
#include "mrflow/physics.hpp"

namespace mrflow {

/// Linear bulk transfer coefficients relating cross-interface jumps to
/// momentum and heat fluxes.
struct BulkCoefficients {
    double b_u = 0.0, b_v = 0.0, b_T = 0.0;
};

/// b_u = b_v = 2*mu1*mu2 / (dz2*mu1 + dz1*mu2); b_T the same with kappa.
/// Harmonic-mean structure: vanishes when either side's coefficient does.
inline BulkCoefficients bulk_coefficients(double mu1, double mu2, double kappa1, double kappa2,
                                          double dz1, double dz2) {
    if (!(dz1 > 0.0) || !(dz2 > 0.0))
        throw std::invalid_argument("bulk_coefficients: layer heights must be positive");
    BulkCoefficients c;
    const double mden = dz2 * mu1 + dz1 * mu2;
    c.b_u = c.b_v = (mden > 0.0) ? 2.0 * mu1 * mu2 / mden : 0.0;
    const double kden = dz2 * kappa1 + dz1 * kappa2;
    c.b_T = (kden > 0.0) ? 2.0 * kappa1 * kappa2 / kden : 0.0;
    return c;
}

/// Per-interface-face momentum and heat fluxes plus the common interface
/// velocity. One stored value per face; the two sides apply it with opposite
/// orientation, which is what makes the exchange conservative.
struct InterfaceFluxes {
    int nx = 0, ny = 0;
    std::vector<double> sigma_xz, sigma_yz, pi_z;
    std::vector<double> u_wall, v_wall;

    void resize(int nx_, int ny_) {
        nx = nx_;
        ny = ny_;
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        sigma_xz.assign(n, 0.0);
        sigma_yz.assign(n, 0.0);
        pi_z.assign(n, 0.0);
        u_wall.assign(n, 0.0);
        v_wall.assign(n, 0.0);
    }
    long face_count() const { return static_cast<long>(nx) * ny; }
    long face(int i, int j) const { return i + static_cast<long>(nx) * j; }
};

struct WallState {
    double u = 0.0, v = 0.0, T = 0.0;
};

/// Interface boundary state seen by one side (1 = below, 2 = above) given the
/// shared fluxes. With the linear bulk coefficients both sides reconstruct the
/// same interface velocity and temperature. Normal velocity is zero.
inline WallState wall_states(const PrimitiveState& cell, double sigma_xz, double sigma_yz,
                             double pi_z, int side, double dz, double mu, double kappa) {
    if (side != 1 && side != 2) throw std::invalid_argument("wall_states: side must be 1 or 2");
    const double sgn = (side == 1) ? 1.0 : -1.0;
    WallState w;
    w.u = (mu > 0.0) ? cell.u + sgn * sigma_xz * dz / (2.0 * mu) : cell.u;
    w.v = (mu > 0.0) ? cell.v + sgn * sigma_yz * dz / (2.0 * mu) : cell.v;
    w.T = (kappa > 0.0) ? cell.T - sgn * pi_z * dz / (2.0 * kappa) : cell.T;
    return w;
}

/// Bulk fluxes for every interface face from the two adjacent cell layers:
/// sigma_xz = b_u (u2 - u1), sigma_yz = b_v (v2 - v1), Pi_z = -b_T (T2 - T1).
/// Only horizontal velocity and temperature enter; the normal component is
/// pinned to zero by the rigid lid.
inline InterfaceFluxes interface_fluxes(const ConservedField& f1, const StructuredGrid& g1,
                                        const FluidParams& p1, const ConservedField& f2,
                                        const StructuredGrid& g2, const FluidParams& p2,
                                        const BulkCoefficients& bc) {
    if (g1.nx != g2.nx || g1.ny != g2.ny)
        throw std::invalid_argument("interface_fluxes: non-conformal interface");
    InterfaceFluxes out;
    out.resize(g1.nx, g1.ny);
    const int k1 = g1.nz - 1;
    for (int j = 0; j < g1.ny; ++j) {
        for (int i = 0; i < g1.nx; ++i) {
            const long e1 = f1.index(i, j, k1);
            const long e2 = f2.index(i, j, 0);
            const PrimitiveState s1 = conserved_to_primitive(f1.cell(e1), p1, e1);
            const PrimitiveState s2 = conserved_to_primitive(f2.cell(e2), p2, e2);
            const long f = out.face(i, j);
            out.sigma_xz[f] = bc.b_u * (s2.u - s1.u);
            out.sigma_yz[f] = bc.b_v * (s2.v - s1.v);
            out.pi_z[f] = -bc.b_T * (s2.T - s1.T);
            if (p1.mu_tilde > 0.0) {
                const WallState w =
                    wall_states(s1, out.sigma_xz[f], out.sigma_yz[f], out.pi_z[f], 1, g1.dz,
                                p1.mu_tilde, p1.kappa_tilde());
                out.u_wall[f] = w.u;
                out.v_wall[f] = w.v;
            } else {
                out.u_wall[f] = 0.5 * (s1.u + s2.u);
                out.v_wall[f] = 0.5 * (s1.v + s2.v);
            }
        }
    }
    return out;
}

/// Stage-level exchange: both regions must be at the same stage index.
inline InterfaceFluxes exchange_interface_data(int stage_fast, int stage_buffer,
                                               const ConservedField& f1, const StructuredGrid& g1,
                                               const FluidParams& p1, const ConservedField& f2,
                                               const StructuredGrid& g2, const FluidParams& p2,
                                               const BulkCoefficients& bc) {
    if (stage_fast != stage_buffer)
        throw std::logic_error("exchange_interface_data: fast/buffer stage index mismatch");
    return interface_fluxes(f1, g1, p1, f2, g2, p2, bc);
}

}  // namespace mrflow

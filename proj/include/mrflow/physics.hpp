#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mrflow {

/// Number of conserved variables: rho, rho*u, rho*v, rho*w, rho*E.
inline constexpr int kVars = 5;

/// Signals a conserved state that decodes to non-positive density or
/// pressure. Carries the offending cell index when known.
struct NonPhysicalState : std::runtime_error {
    long cell = -1;
    explicit NonPhysicalState(const std::string& what, long cell_index = -1)
        : std::runtime_error(what), cell(cell_index) {}
};

/// Nondimensional fluid constants of one subdomain. `gravity` is the signed
/// z acceleration (negative pulls toward -z); the momentum source density is
/// rho * gravity.
struct FluidParams {
    double gamma = 1.4;
    double mu_tilde = 0.0;   // nondimensional dynamic viscosity, mu*/Re_r
    double prandtl = 0.72;
    double gravity = 0.0;

    double cp_tilde() const { return 1.0 / (gamma - 1.0); }
    double kappa_tilde() const { return cp_tilde() * mu_tilde / prandtl; }
};

struct PrimitiveState {
    double rho = 0.0, u = 0.0, v = 0.0, w = 0.0, p = 0.0, T = 0.0;

    double internal_energy(double gamma) const { return p / (rho * (gamma - 1.0)); }
    double total_enthalpy(double gamma) const {
        const double ke = 0.5 * (u * u + v * v + w * w);
        return internal_energy(gamma) + ke + p / rho;
    }
    double sound_speed(double gamma) const { return std::sqrt(gamma * p / rho); }
};

/// Normalized ideal-gas law, p = rho*T/gamma (equivalently p = rho*e*(gamma-1)).
inline double eos_pressure(double rho, double T, double gamma) { return rho * T / gamma; }

inline PrimitiveState conserved_to_primitive(const double q[kVars], const FluidParams& par,
                                             long cell = -1) {
    PrimitiveState s;
    s.rho = q[0];
    if (!(s.rho > 0.0))
        throw NonPhysicalState("non-positive density rho=" + std::to_string(s.rho), cell);
    const double inv_rho = 1.0 / s.rho;
    s.u = q[1] * inv_rho;
    s.v = q[2] * inv_rho;
    s.w = q[3] * inv_rho;
    const double ke = 0.5 * s.rho * (s.u * s.u + s.v * s.v + s.w * s.w);
    s.p = (par.gamma - 1.0) * (q[4] - ke);
    if (!(s.p > 0.0))
        throw NonPhysicalState("non-positive pressure p=" + std::to_string(s.p), cell);
    s.T = par.gamma * s.p * inv_rho;
    return s;
}

inline void primitive_to_conserved(const PrimitiveState& s, const FluidParams& par,
                                   double q[kVars]) {
    q[0] = s.rho;
    q[1] = s.rho * s.u;
    q[2] = s.rho * s.v;
    q[3] = s.rho * s.w;
    q[4] = s.p / (par.gamma - 1.0) + 0.5 * s.rho * (s.u * s.u + s.v * s.v + s.w * s.w);
}

/// Directional Euler flux column for axis in {0,1,2} (x, y, z).
inline void inviscid_flux(const double q[kVars], int axis, const FluidParams& par,
                          double out[kVars]) {
    const PrimitiveState s = conserved_to_primitive(q, par);
    const double vel[3] = {s.u, s.v, s.w};
    const double un = vel[axis];
    out[0] = s.rho * un;
    out[1] = q[1] * un;
    out[2] = q[2] * un;
    out[3] = q[3] * un;
    out[1 + axis] += s.p;
    out[4] = (q[4] + s.p) * un;  // rho*H*un
}

/// Viscous flux column along `axis` from face-common states: velocity,
/// velocity gradient (grad_vel[c*3+d] = du_c/dx_d) and temperature gradient.
/// Energy row is u.sigma_axis - Pi_axis with Pi = -kappa * grad T.
inline void viscous_flux(const double vel[3], const double grad_vel[9], const double grad_T[3],
                         const FluidParams& par, int axis, double out[kVars]) {
    const double mu = par.mu_tilde;
    const double div = grad_vel[0] + grad_vel[4] + grad_vel[8];
    double sig[3];  // sigma[c][axis] for c = x,y,z
    for (int c = 0; c < 3; ++c) {
        sig[c] = mu * (grad_vel[c * 3 + axis] + grad_vel[axis * 3 + c]);
        if (c == axis) sig[c] -= (2.0 / 3.0) * mu * div;
    }
    out[0] = 0.0;
    out[1] = sig[0];
    out[2] = sig[1];
    out[3] = sig[2];
    out[4] = vel[0] * sig[0] + vel[1] * sig[1] + vel[2] * sig[2]
           + par.kappa_tilde() * grad_T[axis];
}

/// Gravity source for z-aligned gravity: (0, 0, 0, rho*g, rho*g*w).
inline void gravity_source(const double q[kVars], const FluidParams& par, double out[kVars]) {
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = 0.0;
    out[3] = q[0] * par.gravity;
    out[4] = q[3] * par.gravity;
}

/// Spectral radius |u_n| + a of the directional inviscid flux Jacobian.
inline double spectral_radius(const PrimitiveState& s, double gamma, int axis) {
    const double vel[3] = {s.u, s.v, s.w};
    return std::fabs(vel[axis]) + s.sound_speed(gamma);
}

// ----------------------------------------------------------------------------
// Reference scaling (dimensional -> nondimensional)
// ----------------------------------------------------------------------------

struct ReferenceSet {
    double rho_r = 1.0;
    double u_r = 1.0;
    double T_r = 1.0;
    double length = 1.0;
    double mu_r = 1.0;

    double reynolds() const { return rho_r * u_r * length / mu_r; }
};

/// Reference set with u_r chosen as the far-field sound speed sqrt(gamma*R*T).
inline ReferenceSet reference_from_sound_speed(double gamma, double R_gas, double T_inf,
                                               double rho_inf, double mu_inf, double length) {
    ReferenceSet r;
    r.rho_r = rho_inf;
    r.u_r = std::sqrt(gamma * R_gas * T_inf);
    r.T_r = T_inf;
    r.length = length;
    r.mu_r = mu_inf;
    return r;
}

inline double nondim_density(double rho, const ReferenceSet& r) { return rho / r.rho_r; }
inline double nondim_velocity(double u, const ReferenceSet& r) { return u / r.u_r; }
inline double nondim_pressure(double p, const ReferenceSet& r) { return p / (r.rho_r * r.u_r * r.u_r); }
inline double nondim_temperature(double T, const ReferenceSet& r) { return T / r.T_r; }
inline double nondim_length(double x, const ReferenceSet& r) { return x / r.length; }
inline double nondim_time(double t, const ReferenceSet& r) { return t * r.u_r / r.length; }
inline double nondim_gravity(double g, const ReferenceSet& r) {
    return g / (r.u_r * r.u_r / r.length);
}
/// mu_tilde = (mu/mu_r)/Re_r, which collapses to mu/(rho_r*u_r*L).
inline double nondim_viscosity(double mu, const ReferenceSet& r) {
    return (mu / r.mu_r) / r.reynolds();
}
/// cp_tilde = T_r*cp/u_r^2; equals 1/(gamma-1) under the sound-speed convention.
inline double nondim_heat_capacity(double cp, const ReferenceSet& r) {
    return r.T_r * cp / (r.u_r * r.u_r);
}

}  // namespace mrflow

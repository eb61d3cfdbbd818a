#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrflow/domain.hpp"
#include "mrflow/integrator.hpp"
#include "mrflow/physics.hpp"
#include "mrflow/spatial.hpp"

namespace mrflow {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Compact cosine potential-temperature perturbation centered at (cx,cy,cz):
/// amplitude * (1 + cos(pi r / radius)) inside r <= radius, zero outside.
struct BumpSpec {
    double amplitude = 0.0;
    double radius = 1.0;
    double cx = 0.0, cy = 0.0, cz = 0.0;
};

/// Horizontal jet u(z) = amplitude * sech^2((z - center_z)/width).
struct JetSpec {
    double amplitude = 0.0;
    double center_z = 0.0;
    double width = 1.0;
};

/// Gaussian-streamfunction vortex in the x-z plane.
struct VortexSpec {
    double amplitude = 0.0;
    double cx = 0.0, cz = 0.0;
    double radius = 1.0;
};

struct ScenarioConfig {
    std::string name = "convection2d";
    DomainConfig domain;
    double gamma = 1.4;
    double prandtl = 0.72;
    double mu1 = 1.0 / 20000.0;
    double mu2 = 1.0 / 5000.0;
    double gravity = -0.008140864714;
    double theta0 = 300.0;
    BumpSpec bump1, bump2;    // potential-temperature perturbations per domain
    JetSpec jet2;             // horizontal jet in domain 2
    VortexSpec vortex1;       // vortex in domain 1
    bool periodic_x = false;
    bool periodic_y = false;
    SchemeKind scheme = SchemeKind::Mprk;
    int rate_ratio = 2;
    double dt = 0.025;
    double t_end = 2.5;
    int history_cadence = 1;
    int snapshot_cadence = 0;  // steps between snapshots; 0 = initial/final only
    int threads = 1;

    FluidParams params1() const { return FluidParams{gamma, mu1, prandtl, gravity}; }
    FluidParams params2() const { return FluidParams{gamma, mu2, prandtl, gravity}; }

    BcSpec bc_domain1() const {
        BcSpec bc;
        bc.x_lo = bc.x_hi = periodic_x ? BcKind::Periodic : BcKind::AdiabaticNoSlipWall;
        bc.y_lo = bc.y_hi = periodic_y ? BcKind::Periodic : BcKind::AdiabaticNoSlipWall;
        bc.z_lo = BcKind::AdiabaticNoSlipWall;
        bc.z_hi = BcKind::CoupledInterface;
        return bc;
    }
    BcSpec bc_domain2() const {
        BcSpec bc = bc_domain1();
        bc.z_lo = BcKind::CoupledInterface;
        bc.z_hi = BcKind::AdiabaticNoSlipWall;
        return bc;
    }
};

inline void validate_scenario(const ScenarioConfig& cfg) {
    if (!(cfg.gamma > 1.0)) throw ConfigError("scenario: gamma must exceed 1");
    if (!(cfg.prandtl > 0.0)) throw ConfigError("scenario: Prandtl number must be positive");
    if (cfg.mu1 < 0.0 || cfg.mu2 < 0.0) throw ConfigError("scenario: negative viscosity");
    if (!(cfg.bump1.radius > 0.0) || !(cfg.bump2.radius > 0.0))
        throw ConfigError("scenario: perturbation radii must be positive");
    if (!(cfg.dt > 0.0)) throw ConfigError("scenario: dt must be positive");
    if (cfg.t_end < 0.0) throw ConfigError("scenario: t_end must be nonnegative");
    if (cfg.rate_ratio < 1) throw ConfigError("scenario: rate ratio m must be >= 1");
    if (!(cfg.theta0 > 0.0)) throw ConfigError("scenario: theta0 must be positive");
    if (cfg.threads < 1) throw ConfigError("scenario: threads must be >= 1");
}

namespace detail {

inline double cosine_bump(double r, const BumpSpec& b) {
    if (b.amplitude == 0.0 || r > b.radius) return 0.0;
    return b.amplitude * (1.0 + std::cos(M_PI * r / b.radius));
}

inline double sech2(double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
}

/// Neutrally stratified base state plus configured perturbations on one
/// domain. Evaluated at cell centers.
inline void fill_domain(ConservedField& f, const StructuredGrid& g, const ScenarioConfig& cfg,
                        int which) {
    const FluidParams par = (which == 1) ? cfg.params1() : cfg.params2();
    const BumpSpec& bump = (which == 1) ? cfg.bump1 : cfg.bump2;
    const double cp = par.cp_tilde();
    const bool three_d = !g.two_d();

    for (int k = 0; k < g.nz; ++k) {
        const double z = g.zc(k);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.yc(j);
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.xc(i);
                double r2 = (x - bump.cx) * (x - bump.cx) + (z - bump.cz) * (z - bump.cz);
                if (three_d) r2 += (y - bump.cy) * (y - bump.cy);
                const double dth = cosine_bump(std::sqrt(r2), bump);
                const double ratio = 1.0 + dth / cfg.theta0;
                const double psi = 1.0 + cfg.gravity * z / (cp * ratio);
                if (!(psi > 0.0))
                    throw ConfigError("scenario: hydrostatic profile is non-positive at z=" +
                                      std::to_string(z) + " (domain too deep for this gravity)");
                PrimitiveState s;
                s.T = ratio * psi;
                s.p = std::pow(psi, cfg.gamma / (cfg.gamma - 1.0)) / cfg.gamma;
                s.rho = (cfg.theta0 / (cfg.theta0 + dth)) * std::pow(psi, 1.0 / (cfg.gamma - 1.0));

                if (which == 2 && cfg.jet2.amplitude != 0.0)
                    s.u += cfg.jet2.amplitude * sech2((z - cfg.jet2.center_z) / cfg.jet2.width);
                if (which == 1 && cfg.vortex1.amplitude != 0.0) {
                    const double rx = x - cfg.vortex1.cx, rz = z - cfg.vortex1.cz;
                    const double r2v = cfg.vortex1.radius * cfg.vortex1.radius;
                    const double psi_v =
                        cfg.vortex1.amplitude * std::exp(-0.5 * (rx * rx + rz * rz) / r2v);
                    s.u += -rz / r2v * psi_v;
                    s.w += rx / r2v * psi_v;
                }
                primitive_to_conserved(s, par, f.cell(f.index(i, j, k)));
            }
        }
    }
}

}  // namespace detail

/// Cell-centered initial state of both domains for a validated config.
inline CoupledState init_scenario(const ScenarioConfig& cfg, const CoupledDomain& dom) {
    validate_scenario(cfg);
    CoupledState st;
    st.field1 = ConservedField(dom.grid1);
    st.field2 = ConservedField(dom.grid2);
    st.time = 0.0;
    detail::fill_domain(st.field1, dom.grid1, cfg, 1);
    detail::fill_domain(st.field2, dom.grid2, cfg, 2);
    return st;
}

/// Hydrostatic base state with the cosine temperature perturbations only.
inline CoupledState init_thermal_convection(const ScenarioConfig& cfg, const CoupledDomain& dom) {
    ScenarioConfig c = cfg;
    c.jet2 = JetSpec{};
    c.vortex1 = VortexSpec{};
    return init_scenario(c, dom);
}

/// Hydrostatic base state plus a jet in domain 2 and a vortex in domain 1.
inline CoupledState init_khi(const ScenarioConfig& cfg, const CoupledDomain& dom) {
    ScenarioConfig c = cfg;
    c.bump1 = BumpSpec{};
    c.bump2 = BumpSpec{};
    return init_scenario(c, dom);
}

/// 3D analogs.
inline CoupledState init_thermal_bubble_3d(const ScenarioConfig& cfg, const CoupledDomain& dom) {
    return init_thermal_convection(cfg, dom);
}
inline CoupledState init_wind_driven_3d(const ScenarioConfig& cfg, const CoupledDomain& dom) {
    return init_khi(cfg, dom);
}

// ----------------------------------------------------------------------------
// Presets
// ----------------------------------------------------------------------------

/// Vertically split box for the speedup experiments: nz_total layers over
/// [0, z_extent] shifted so the split plane sits at z=0; the fast domain is
/// the bottom nz_total - slow - buffer layers.
inline ScenarioConfig make_wind_driven_config(int nx, int ny, int nz_total, double xy_extent,
                                              double z_extent, double slow_fraction,
                                              int buffer_layers) {
    const int slow_layers = static_cast<int>(std::lround(slow_fraction * nz_total));
    const int fast_layers = nz_total - slow_layers - buffer_layers;
    if (fast_layers < 1)
        throw ConfigError("wind3d: no layers left for the fast region");
    const double dz = z_extent / nz_total;

    ScenarioConfig cfg;
    cfg.name = "wind3d";
    cfg.domain.lower = BoxSpec{0.0, xy_extent, 0.0, xy_extent, -fast_layers * dz, 0.0,
                               nx, ny, fast_layers};
    cfg.domain.upper = BoxSpec{0.0, xy_extent, 0.0, xy_extent, 0.0,
                               (slow_layers + buffer_layers) * dz, nx, ny,
                               slow_layers + buffer_layers};
    cfg.domain.buffer_layers = buffer_layers;
    cfg.gravity = -0.008140864714;
    cfg.jet2 = JetSpec{0.05, 2.0 * dz * buffer_layers, dz * buffer_layers};
    cfg.scheme = SchemeKind::Mprk;
    cfg.rate_ratio = 4;
    cfg.dt = 0.02;
    cfg.t_end = 0.2;
    return cfg;
}

inline std::vector<std::string> preset_names() {
    return {"khi2d", "convection2d", "convection2d-dual", "bubble3d", "wind3d", "manufactured"};
}

inline ScenarioConfig preset(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    if (name == "convection2d") {
        cfg.domain.lower = BoxSpec{-5, 5, 0, 1, -5, 0, 100, 1, 100};
        cfg.domain.upper = BoxSpec{-5, 5, 0, 1, 0, 5, 100, 1, 200};
        cfg.bump1 = BumpSpec{0.25, 2.5, 0.0, 0.0, -2.5};
        cfg.rate_ratio = 2;
        cfg.dt = 0.0125;
        cfg.t_end = 2.5;
    } else if (name == "convection2d-dual") {
        cfg.domain.lower = BoxSpec{-5, 5, 0, 1, -7, 0, 100, 1, 100};
        cfg.domain.upper = BoxSpec{-5, 5, 0, 1, 0, 3, 100, 1, 200};
        cfg.bump1 = BumpSpec{1.25, 2.5, 0.0, 0.0, -2.5};
        cfg.bump2 = BumpSpec{-7.5, 1.0, 0.0, 0.0, 1.5};
        cfg.rate_ratio = 4;
        cfg.dt = 0.005;
        cfg.t_end = 2.5;
    } else if (name == "khi2d") {
        cfg.domain.lower = BoxSpec{-40, 40, 0, 1, -100, 0, 160, 1, 80};
        cfg.domain.upper = BoxSpec{-40, 40, 0, 1, 0, 100, 160, 1, 80};
        cfg.gravity = -0.002;
        cfg.periodic_x = true;
        cfg.jet2 = JetSpec{0.05, 25.0, 8.0};
        cfg.vortex1 = VortexSpec{0.02, 0.0, -25.0, 10.0};
        cfg.rate_ratio = 2;
        cfg.dt = 0.25;
        cfg.t_end = 500.0;
    } else if (name == "bubble3d") {
        cfg.domain.lower = BoxSpec{-5, 5, -5, 5, -16, 0, 32, 32, 48};
        cfg.domain.upper = BoxSpec{-5, 5, -5, 5, 0, 2, 32, 32, 16};
        cfg.bump1 = BumpSpec{7.5, 2.5, 0.0, 0.0, -8.0};
        cfg.bump2 = BumpSpec{-7.5, 2.5, 0.0, 0.0, 1.0};
        cfg.rate_ratio = 4;
        cfg.dt = 0.02;
        cfg.t_end = 1.0;
    } else if (name == "wind3d") {
        cfg = make_wind_driven_config(20, 20, 50, 5.0, 10.0, 0.54, 6);
    } else if (name == "manufactured") {
        cfg.domain.lower = BoxSpec{-5, 5, 0, 1, -5, 0, 40, 1, 40};
        cfg.domain.upper = BoxSpec{-5, 5, 0, 1, 0, 5, 40, 1, 40};
        cfg.periodic_x = true;
        cfg.bump1 = BumpSpec{0.5, 2.0, 0.0, 0.0, -2.5};
        cfg.bump2 = BumpSpec{-0.5, 1.5, 0.0, 0.0, 2.5};
        cfg.jet2 = JetSpec{0.02, 2.0, 1.0};
        cfg.rate_ratio = 2;
        cfg.dt = 0.02;
        cfg.t_end = 1.0;
    } else {
        throw ConfigError("unknown scenario preset: " + name);
    }
    return cfg;
}

}  // namespace mrflow

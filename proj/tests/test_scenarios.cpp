#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mrflow/diagnostics.hpp"
#include "mrflow/scenarios.hpp"
#include "test_support.hpp"

using namespace mrflow;
using namespace testsupport;

TEST_CASE("zero gravity gives the uniform surface base state everywhere") {
    ScenarioConfig cfg = small_convection(8, 8, 10);
    cfg.gravity = 0.0;  // Psi = 1 at every z, same as evaluating at z = 0
    cfg.bump1 = BumpSpec{};
    const CoupledDomain dom = build_coupled_domain(cfg.domain);
    const CoupledState st = init_scenario(cfg, dom);
    const FluidParams par = cfg.params1();
    for (long e = 0; e < st.field1.cell_count(); ++e) {
        const PrimitiveState s = conserved_to_primitive(st.field1.cell(e), par);
        CHECK_THAT(s.rho, Catch::Matchers::WithinRel(1.0, 1e-14));
        CHECK_THAT(s.T, Catch::Matchers::WithinRel(1.0, 1e-14));
        CHECK_THAT(s.p, Catch::Matchers::WithinRel(1.0 / cfg.gamma, 1e-14));
    }
}

TEST_CASE("thermal convection initial condition matches the closed forms") {
    ScenarioConfig cfg = small_convection(20, 20, 24);
    const CoupledDomain dom = build_coupled_domain(cfg.domain);
    const CoupledState st = init_scenario(cfg, dom);
    const double cp = 1.0 / (cfg.gamma - 1.0);

    SECTION("pointwise values and EOS consistency in both domains") {
        auto check_domain = [&](const ConservedField& f, const StructuredGrid& g,
                                const FluidParams& par, const BumpSpec& bump) {
            for (int k = 0; k < g.nz; ++k)
                for (int i = 0; i < g.nx; ++i) {
                    const double x = g.xc(i), z = g.zc(k);
                    const double r = std::hypot(x - bump.cx, z - bump.cz);
                    const double dth = (bump.amplitude != 0.0 && r <= bump.radius)
                                           ? bump.amplitude * (1.0 + std::cos(M_PI * r / bump.radius))
                                           : 0.0;
                    const double ratio = 1.0 + dth / cfg.theta0;
                    const double psi = 1.0 + cfg.gravity * z / (cp * ratio);
                    const PrimitiveState s =
                        conserved_to_primitive(f.cell(f.index(i, 0, k)), par);
                    CHECK_THAT(s.T, Catch::Matchers::WithinRel(ratio * psi, 1e-13));
                    CHECK_THAT(s.rho,
                               Catch::Matchers::WithinRel(
                                   cfg.theta0 / (cfg.theta0 + dth) *
                                       std::pow(psi, 1.0 / (cfg.gamma - 1.0)),
                                   1e-13));
                    CHECK_THAT(s.p, Catch::Matchers::WithinRel(
                                        std::pow(psi, cfg.gamma / (cfg.gamma - 1.0)) / cfg.gamma,
                                        1e-13));
                    // the three closed forms are EOS-consistent
                    CHECK_THAT(eos_pressure(s.rho, s.T, cfg.gamma),
                               Catch::Matchers::WithinRel(s.p, 1e-13));
                }
        };
        check_domain(st.field1, dom.grid1, cfg.params1(), cfg.bump1);
        check_domain(st.field2, dom.grid2, cfg.params2(), cfg.bump2);
    }
    SECTION("initial state passes the physical-validity scan") {
        CHECK(!first_invalid_cell(st.field1, cfg.params1()).has_value());
        CHECK(!first_invalid_cell(st.field2, cfg.params2()).has_value());
    }
    SECTION("construction is deterministic") {
        const CoupledState again = init_scenario(cfg, dom);
        CHECK(again.field1.data == st.field1.data);
        CHECK(again.field2.data == st.field2.data);
    }
}

TEST_CASE("perturbation vanishes at the bump radius") {
    // the cosine profile is continuous: just inside r = R the amplitude is ~0
    BumpSpec b{0.25, 2.5, 0.0, 0.0, 0.0};
    namespace sd = mrflow::detail;
    CHECK(sd::cosine_bump(0.0, b) == 0.5);
    CHECK_THAT(sd::cosine_bump(2.5 - 1e-9, b), Catch::Matchers::WithinAbs(0.0, 1e-8));
    CHECK(sd::cosine_bump(2.5001, b) == 0.0);
}

TEST_CASE("a domain too deep for the stratification is a configuration error") {
    ScenarioConfig cfg = small_convection(8, 8, 10);
    cfg.domain.upper.z_max = 400.0;  // Psi crosses zero near z = +307
    CHECK_THROWS_AS(init_scenario(cfg, build_coupled_domain(cfg.domain)), ConfigError);
}

TEST_CASE("Kelvin-Helmholtz initial condition") {
    ScenarioConfig cfg = preset("khi2d");
    cfg.domain.lower.nx = cfg.domain.upper.nx = 24;
    cfg.domain.lower.nz = cfg.domain.upper.nz = 12;
    const CoupledDomain dom = build_coupled_domain(cfg.domain);

    SECTION("zero amplitudes reduce to the hydrostatic state") {
        ScenarioConfig quiet = cfg;
        quiet.jet2 = JetSpec{};
        quiet.vortex1 = VortexSpec{};
        const CoupledState a = init_khi(quiet, dom);
        const CoupledState b = init_thermal_convection(quiet, dom);
        CHECK(a.field1.data == b.field1.data);
        CHECK(a.field2.data == b.field2.data);
    }
    SECTION("velocity-only perturbations leave the total mass unchanged") {
        const CoupledState with = init_khi(cfg, dom);
        ScenarioConfig quiet = cfg;
        quiet.jet2 = JetSpec{};
        quiet.vortex1 = VortexSpec{};
        const CoupledState without = init_khi(quiet, dom);
        CHECK(total_mass(with.field1, dom.grid1) == total_mass(without.field1, dom.grid1));
        CHECK(total_mass(with.field2, dom.grid2) == total_mass(without.field2, dom.grid2));
        // but the jet does add momentum
        double mom = 0.0;
        for (long e = 0; e < with.field2.cell_count(); ++e) mom += with.field2.cell(e)[1];
        CHECK(mom > 0.0);
    }
    SECTION("initial state is physically valid") {
        const CoupledState st = init_khi(cfg, dom);
        CHECK(!first_invalid_cell(st.field1, cfg.params1()).has_value());
        CHECK(!first_invalid_cell(st.field2, cfg.params2()).has_value());
    }
}

TEST_CASE("three-dimensional scenarios") {
    SECTION("thermal bubble layout and hydrostatic mass convergence") {
        ScenarioConfig cfg = preset("bubble3d");
        cfg.bump1 = BumpSpec{};
        cfg.bump2 = BumpSpec{};
        // analytic mass of the hydrostatic column: integral of Psi^(1/(gamma-1))
        auto exact_mass = [&](double z0, double z1, double area) {
            const double cp = 1.0 / (cfg.gamma - 1.0);
            const double a = cfg.gravity / cp;
            const double e = 1.0 / (cfg.gamma - 1.0);
            auto anti = [&](double z) {
                return std::pow(1.0 + a * z, e + 1.0) / (a * (e + 1.0));
            };
            return area * (anti(z1) - anti(z0));
        };
        auto measured = [&](int scale) {
            ScenarioConfig c = cfg;
            c.domain.lower.nx = c.domain.lower.ny = 8 * scale;
            c.domain.lower.nz = 16 * scale;
            c.domain.upper.nx = c.domain.upper.ny = 8 * scale;
            c.domain.upper.nz = 4 * scale;
            c.domain.buffer_layers = 2;
            const CoupledDomain dom = build_coupled_domain(c.domain);
            const CoupledState st = init_scenario(c, dom);
            const double area = (c.domain.lower.x_max - c.domain.lower.x_min) *
                                (c.domain.lower.y_max - c.domain.lower.y_min);
            const double exact = exact_mass(c.domain.lower.z_min, 0.0, area) +
                                 exact_mass(0.0, c.domain.upper.z_max, area);
            return std::fabs(total_mass(st.field1, dom.grid1) +
                             total_mass(st.field2, dom.grid2) - exact);
        };
        const double e1 = measured(1), e2 = measured(2), e3 = measured(4);
        CHECK(std::log2(e1 / e2) > 1.8);
        CHECK(std::log2(e2 / e3) > 1.8);
    }
    SECTION("full-resolution bubble grids build and validate") {
        const ScenarioConfig cfg = preset("bubble3d");
        ScenarioConfig full = cfg;
        full.domain.lower.nx = full.domain.lower.ny = 100;
        full.domain.lower.nz = 200;
        full.domain.upper.nx = full.domain.upper.ny = 100;
        full.domain.upper.nz = 100;
        const CoupledDomain dom = build_coupled_domain(full.domain);
        CHECK(dom.grid1.cell_count() == 2000000);
        CHECK(dom.grid2.cell_count() == 1000000);
        CHECK_THAT(dom.grid1.dz, Catch::Matchers::WithinRel(0.08, 1e-12));
        CHECK_THAT(dom.grid2.dz, Catch::Matchers::WithinRel(0.02, 1e-12));
    }
    SECTION("wind-driven split box: zero perturbation is hydrostatic rest") {
        ScenarioConfig cfg = make_wind_driven_config(8, 8, 20, 5.0, 10.0, 0.4, 4);
        cfg.jet2 = JetSpec{};
        const CoupledDomain dom = build_coupled_domain(cfg.domain);
        const CoupledState st = init_wind_driven_3d(cfg, dom);
        for (long e = 0; e < st.field1.cell_count(); ++e) {
            CHECK(st.field1.cell(e)[1] == 0.0);
            CHECK(st.field1.cell(e)[3] == 0.0);
        }
        CHECK(!first_invalid_cell(st.field2, cfg.params2()).has_value());
    }
}

TEST_CASE("scenario preset registry") {
    for (const auto& name : preset_names()) {
        const ScenarioConfig cfg = preset(name);
        CHECK(cfg.name == name);
        CHECK_NOTHROW(build_coupled_domain(cfg.domain));
        CHECK_NOTHROW(validate_scenario(cfg));
    }
    CHECK_THROWS_AS(preset("nonsense"), ConfigError);
}

TEST_CASE("scenario validation rejects bad inputs") {
    ScenarioConfig cfg = small_convection(8, 8, 10);
    SECTION("nonpositive radius") {
        cfg.bump1.radius = 0.0;
        CHECK_THROWS_AS(validate_scenario(cfg), ConfigError);
    }
    SECTION("nonpositive dt") {
        cfg.dt = 0.0;
        CHECK_THROWS_AS(validate_scenario(cfg), ConfigError);
    }
    SECTION("bad rate ratio") {
        cfg.rate_ratio = 0;
        CHECK_THROWS_AS(validate_scenario(cfg), ConfigError);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "mrflow/config.hpp"
#include "mrflow/snapshot.hpp"

using namespace mrflow;

TEST_CASE("config serialization round trip") {
    for (const auto& name : preset_names()) {
        const ScenarioConfig cfg = preset(name);
        const json doc = config_to_json(cfg);
        const ScenarioConfig back = config_from_json(doc);
        CHECK(config_to_json(back) == doc);
    }
}

TEST_CASE("config parsing") {
    SECTION("preset base with section overrides") {
        json doc = {{"scenario", "convection2d"},
                    {"time", {{"dt", 0.05}, {"m", 8}}},
                    {"threads", 2}};
        const ScenarioConfig cfg = config_from_json(doc);
        CHECK(cfg.dt == 0.05);
        CHECK(cfg.rate_ratio == 8);
        CHECK(cfg.threads == 2);
        CHECK(cfg.t_end == preset("convection2d").t_end);  // untouched default
    }
    SECTION("unknown keys are rejected with the offending name") {
        json doc = {{"scenario", "convection2d"}, {"tmie", {{"dt", 0.05}}}};
        try {
            config_from_json(doc);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("tmie") != std::string::npos);
        }
    }
    SECTION("missing required sections without a preset base") {
        json doc = {{"fluids", {{"gamma", 1.4}}}};
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SECTION("missing required field inside a section") {
        json doc = {{"domain",
                     {{"lower",
                       {{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}, {"z", {-1.0, 0.0}},
                        {"cells", {4, 1, 4}}}},
                      {"upper",
                       {{"x", {0.0, 1.0}}, {"y", {0.0, 1.0}}, {"z", {0.0, 1.0}},
                        {"cells", {4, 1, 4}}}}}},
                    {"fluids", {{"gamma", 1.4}}},
                    {"time", {{"scheme", "mprk"}, {"m", 2}, {"dt", 0.01}}}};  // no t_end
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SECTION("bad scheme name") {
        json doc = {{"scenario", "convection2d"}, {"time", {{"scheme", "leapfrog"}}}};
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
    }
    SECTION("dotted overrides") {
        json doc = config_to_json(preset("convection2d"));
        apply_override(doc, "time.dt=0.1");
        apply_override(doc, "bc.periodic_x=true");
        apply_override(doc, "time.scheme=\"rk2\"");
        const ScenarioConfig cfg = config_from_json(doc);
        CHECK(cfg.dt == 0.1);
        CHECK(cfg.periodic_x);
        CHECK(cfg.scheme == SchemeKind::Rk2);
        CHECK_THROWS_AS(apply_override(doc, "no-equals-sign"), ConfigError);
    }
}

TEST_CASE("snapshot write/read round trip") {
    StructuredGrid g;
    g.nx = 5;
    g.ny = 2;
    g.nz = 3;
    g.dx = 0.1;
    g.dy = 0.2;
    g.dz = 0.3;
    g.x0 = -1.0;
    g.y0 = 0.0;
    g.z0 = 2.0;
    ConservedField f(g);
    for (std::size_t t = 0; t < f.data.size(); ++t)
        f.data[t] = std::sin(0.1 * static_cast<double>(t)) * 1e3;

    const std::string path =
        (std::filesystem::temp_directory_path() / "mrflow_snapshot_test.mfs").string();
    write_snapshot(path, f, g, 2, 12.75);
    const Snapshot s = read_snapshot(path);
    CHECK(s.domain_id == 2);
    CHECK(s.time == 12.75);
    CHECK(s.grid.nx == g.nx);
    CHECK(s.grid.ny == g.ny);
    CHECK(s.grid.nz == g.nz);
    CHECK(s.grid.dx == g.dx);
    CHECK(s.grid.x0 == g.x0);
    CHECK(s.field.data == f.data);  // bit-exact payload
    std::remove(path.c_str());
}

TEST_CASE("snapshot writes are byte-for-byte deterministic") {
    StructuredGrid g;
    g.nx = 4;
    g.ny = 1;
    g.nz = 4;
    ConservedField f(g);
    for (std::size_t t = 0; t < f.data.size(); ++t) f.data[t] = 1.0 / (1.0 + double(t));
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / "mrflow_snap_a.mfs").string();
    const std::string b = (dir / "mrflow_snap_b.mfs").string();
    write_snapshot(a, f, g, 1, 0.5);
    write_snapshot(b, f, g, 1, 0.5);
    std::ifstream ia(a, std::ios::binary), ib(b, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(ia)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(ib)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
    std::remove(a.c_str());
    std::remove(b.c_str());
}

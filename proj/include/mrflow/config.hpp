#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "mrflow/scenarios.hpp"

namespace mrflow {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("config: missing required field '" + std::string(key) +
                                            "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + std::string(key) + "' in " + where + ": " +
                          e.what());
    }
}

template <class T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + std::string(key) + "' in " + where + ": " +
                          e.what());
    }
}

inline BoxSpec box_from_json(const json& j, const std::string& where, const BoxSpec* base) {
    check_keys(j, {"x", "y", "z", "cells"}, where);
    BoxSpec b = base ? *base : BoxSpec{};
    auto range = [&](const char* key, double& lo, double& hi, bool req) {
        if (!j.contains(key)) {
            if (req) throw ConfigError("config: missing '" + std::string(key) + "' in " + where);
            return;
        }
        auto v = j.at(key);
        if (!v.is_array() || v.size() != 2)
            throw ConfigError("config: '" + std::string(key) + "' in " + where +
                              " must be [min,max]");
        lo = v[0].get<double>();
        hi = v[1].get<double>();
    };
    const bool req = base == nullptr;
    range("x", b.x_min, b.x_max, req);
    range("y", b.y_min, b.y_max, req);
    range("z", b.z_min, b.z_max, req);
    if (j.contains("cells")) {
        auto c = j.at("cells");
        if (!c.is_array() || c.size() != 3)
            throw ConfigError("config: 'cells' in " + where + " must be [nx,ny,nz]");
        b.nx = c[0].get<int>();
        b.ny = c[1].get<int>();
        b.nz = c[2].get<int>();
    } else if (req) {
        throw ConfigError("config: missing 'cells' in " + where);
    }
    return b;
}

inline json box_to_json(const BoxSpec& b) {
    return json{{"x", {b.x_min, b.x_max}},
                {"y", {b.y_min, b.y_max}},
                {"z", {b.z_min, b.z_max}},
                {"cells", {b.nx, b.ny, b.nz}}};
}

}  // namespace detail

inline std::string scheme_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::Mprk: return "mprk";
        case SchemeKind::Rk2: return "rk2";
        case SchemeKind::Rk4Ref: return "rk4ref";
    }
    return "mprk";
}

inline SchemeKind scheme_from_name(const std::string& s) {
    if (s == "mprk") return SchemeKind::Mprk;
    if (s == "rk2") return SchemeKind::Rk2;
    if (s == "rk4ref") return SchemeKind::Rk4Ref;
    throw ConfigError("config: unknown scheme '" + s + "' (mprk, rk2, rk4ref)");
}

/// Fully resolved config -> JSON; parsing this back reproduces the run.
inline json config_to_json(const ScenarioConfig& c) {
    json j;
    j["scenario"] = c.name;
    j["domain"] = {{"lower", detail::box_to_json(c.domain.lower)},
                   {"upper", detail::box_to_json(c.domain.upper)},
                   {"buffer_layers", c.domain.buffer_layers}};
    j["fluids"] = {{"gamma", c.gamma},     {"prandtl", c.prandtl}, {"mu1", c.mu1},
                   {"mu2", c.mu2},         {"gravity", c.gravity}, {"theta0", c.theta0}};
    j["perturbations"] = {
        {"bump1",
         {{"amplitude", c.bump1.amplitude},
          {"radius", c.bump1.radius},
          {"center", {c.bump1.cx, c.bump1.cy, c.bump1.cz}}}},
        {"bump2",
         {{"amplitude", c.bump2.amplitude},
          {"radius", c.bump2.radius},
          {"center", {c.bump2.cx, c.bump2.cy, c.bump2.cz}}}},
        {"jet2",
         {{"amplitude", c.jet2.amplitude}, {"center_z", c.jet2.center_z}, {"width", c.jet2.width}}},
        {"vortex1",
         {{"amplitude", c.vortex1.amplitude},
          {"center", {c.vortex1.cx, c.vortex1.cz}},
          {"radius", c.vortex1.radius}}}};
    j["bc"] = {{"periodic_x", c.periodic_x}, {"periodic_y", c.periodic_y}};
    j["time"] = {{"scheme", scheme_name(c.scheme)},
                 {"m", c.rate_ratio},
                 {"dt", c.dt},
                 {"t_end", c.t_end}};
    j["output"] = {{"history_cadence", c.history_cadence},
                   {"snapshot_cadence", c.snapshot_cadence}};
    j["threads"] = c.threads;
    return j;
}

/// Parses a config document. A "scenario" key selects a preset base that the
/// remaining sections override; without it every section is required.
inline ScenarioConfig config_from_json(const json& j) {
    using detail::check_keys;
    using detail::maybe;
    if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
    check_keys(j, {"scenario", "domain", "fluids", "perturbations", "bc", "time", "output",
                   "threads"},
               "top level");

    const bool has_base = j.contains("scenario");
    ScenarioConfig c;
    if (has_base) {
        c = preset(j.at("scenario").get<std::string>());
    } else {
        for (const char* k : {"domain", "fluids", "time"})
            if (!j.contains(k))
                throw ConfigError(std::string("config: missing required section '") + k +
                                  "' (or a 'scenario' preset base)");
        c.name = "custom";
    }

    if (j.contains("domain")) {
        const json& d = j.at("domain");
        check_keys(d, {"lower", "upper", "buffer_layers"}, "domain");
        const BoxSpec* lb = has_base ? &c.domain.lower : nullptr;
        const BoxSpec* ub = has_base ? &c.domain.upper : nullptr;
        if (d.contains("lower")) c.domain.lower = detail::box_from_json(d.at("lower"), "domain.lower", lb);
        else if (!has_base) throw ConfigError("config: missing 'domain.lower'");
        if (d.contains("upper")) c.domain.upper = detail::box_from_json(d.at("upper"), "domain.upper", ub);
        else if (!has_base) throw ConfigError("config: missing 'domain.upper'");
        maybe(d, "buffer_layers", c.domain.buffer_layers, "domain");
    }
    if (j.contains("fluids")) {
        const json& f = j.at("fluids");
        check_keys(f, {"gamma", "prandtl", "mu1", "mu2", "gravity", "theta0"}, "fluids");
        maybe(f, "gamma", c.gamma, "fluids");
        maybe(f, "prandtl", c.prandtl, "fluids");
        maybe(f, "mu1", c.mu1, "fluids");
        maybe(f, "mu2", c.mu2, "fluids");
        maybe(f, "gravity", c.gravity, "fluids");
        maybe(f, "theta0", c.theta0, "fluids");
    }
    if (j.contains("perturbations")) {
        const json& p = j.at("perturbations");
        check_keys(p, {"bump1", "bump2", "jet2", "vortex1"}, "perturbations");
        auto bump = [&](const char* key, BumpSpec& b) {
            if (!p.contains(key)) return;
            const json& q = p.at(key);
            check_keys(q, {"amplitude", "radius", "center"}, key);
            maybe(q, "amplitude", b.amplitude, key);
            maybe(q, "radius", b.radius, key);
            if (q.contains("center")) {
                auto v = q.at("center");
                if (!v.is_array() || v.size() != 3)
                    throw ConfigError(std::string("config: '") + key + ".center' must be [x,y,z]");
                b.cx = v[0].get<double>();
                b.cy = v[1].get<double>();
                b.cz = v[2].get<double>();
            }
        };
        bump("bump1", c.bump1);
        bump("bump2", c.bump2);
        if (p.contains("jet2")) {
            const json& q = p.at("jet2");
            check_keys(q, {"amplitude", "center_z", "width"}, "jet2");
            maybe(q, "amplitude", c.jet2.amplitude, "jet2");
            maybe(q, "center_z", c.jet2.center_z, "jet2");
            maybe(q, "width", c.jet2.width, "jet2");
        }
        if (p.contains("vortex1")) {
            const json& q = p.at("vortex1");
            check_keys(q, {"amplitude", "center", "radius"}, "vortex1");
            maybe(q, "amplitude", c.vortex1.amplitude, "vortex1");
            maybe(q, "radius", c.vortex1.radius, "vortex1");
            if (q.contains("center")) {
                auto v = q.at("center");
                if (!v.is_array() || v.size() != 2)
                    throw ConfigError("config: 'vortex1.center' must be [x,z]");
                c.vortex1.cx = v[0].get<double>();
                c.vortex1.cz = v[1].get<double>();
            }
        }
    }
    if (j.contains("bc")) {
        const json& b = j.at("bc");
        check_keys(b, {"periodic_x", "periodic_y"}, "bc");
        maybe(b, "periodic_x", c.periodic_x, "bc");
        maybe(b, "periodic_y", c.periodic_y, "bc");
    }
    if (j.contains("time")) {
        const json& t = j.at("time");
        check_keys(t, {"scheme", "m", "dt", "t_end"}, "time");
        if (has_base) {
            std::string s = scheme_name(c.scheme);
            maybe(t, "scheme", s, "time");
            c.scheme = scheme_from_name(s);
            maybe(t, "m", c.rate_ratio, "time");
            maybe(t, "dt", c.dt, "time");
            maybe(t, "t_end", c.t_end, "time");
        } else {
            c.scheme = scheme_from_name(detail::require<std::string>(t, "scheme", "time"));
            c.rate_ratio = detail::require<int>(t, "m", "time");
            c.dt = detail::require<double>(t, "dt", "time");
            c.t_end = detail::require<double>(t, "t_end", "time");
        }
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"history_cadence", "snapshot_cadence"}, "output");
        maybe(o, "history_cadence", c.history_cadence, "output");
        maybe(o, "snapshot_cadence", c.snapshot_cadence, "output");
    }
    maybe(j, "threads", c.threads, "top level");

    validate_scenario(c);
    return c;
}

inline ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError("config: parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

/// Applies a dotted-path override like "time.dt=0.05" onto a JSON document.
/// The value is parsed as a JSON literal when possible, else kept as string.
inline void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like section.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw ConfigError("override has an empty path segment: " + assignment);
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace mrflow

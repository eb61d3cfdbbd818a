#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrflow/domain.hpp"

namespace mrflow {

/// Structured-grid field dump: an ASCII header (dimensions, origin, spacing,
/// variable names, time) terminated by an "end" line, followed by the raw
/// cell data as little-endian 64-bit floats, five interleaved components per
/// cell, x fastest, then y, then z. One file per (domain, time).
inline void write_snapshot(const std::string& path, const ConservedField& f,
                           const StructuredGrid& g, int domain_id, double time) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path);
    char head[512];
    std::snprintf(head, sizeof head,
                  "mrflow-snapshot 1\n"
                  "domain %d\n"
                  "time %.17g\n"
                  "dims %d %d %d\n"
                  "origin %.17g %.17g %.17g\n"
                  "spacing %.17g %.17g %.17g\n"
                  "variables rho rhou rhov rhow rhoE\n"
                  "layout cell-interleaved x-fastest\n"
                  "data little-endian float64\n"
                  "end\n",
                  domain_id, time, g.nx, g.ny, g.nz, g.x0, g.y0, g.z0, g.dx, g.dy, g.dz);
    os << head;
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(f.data.data()),
                 static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    } else {
        for (double v : f.data) {
            std::uint64_t u;
            std::memcpy(&u, &v, 8);
            char b[8];
            for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
            os.write(b, 8);
        }
    }
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

struct Snapshot {
    int domain_id = 0;
    double time = 0.0;
    StructuredGrid grid;
    ConservedField field;
};

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    Snapshot s;
    std::string line;
    if (!std::getline(is, line) || line != "mrflow-snapshot 1")
        throw std::runtime_error("snapshot: bad magic in " + path);
    while (std::getline(is, line)) {
        if (line == "end") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "domain") ls >> s.domain_id;
        else if (key == "time") ls >> s.time;
        else if (key == "dims") ls >> s.grid.nx >> s.grid.ny >> s.grid.nz;
        else if (key == "origin") ls >> s.grid.x0 >> s.grid.y0 >> s.grid.z0;
        else if (key == "spacing") ls >> s.grid.dx >> s.grid.dy >> s.grid.dz;
        else if (key == "variables" || key == "layout" || key == "data") continue;
        else throw std::runtime_error("snapshot: unknown header line '" + line + "'");
        if (ls.fail()) throw std::runtime_error("snapshot: malformed header line '" + line + "'");
    }
    s.field = ConservedField(s.grid);
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(s.field.data.data()),
                static_cast<std::streamsize>(s.field.data.size() * sizeof(double)));
    } else {
        for (double& v : s.field.data) {
            char b[8];
            is.read(b, 8);
            std::uint64_t u = 0;
            for (int i = 0; i < 8; ++i)
                u |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
            std::memcpy(&v, &u, 8);
        }
    }
    if (!is) throw std::runtime_error("snapshot: truncated payload in " + path);
    return s;
}

}  // namespace mrflow

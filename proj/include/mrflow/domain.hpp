#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mrflow/physics.hpp"

namespace mrflow {

/// Uniform Cartesian mesh of one subdomain. Cells are stored x-fastest,
/// then y, then z, so z-slabs are contiguous.
struct StructuredGrid {
    int nx = 1, ny = 1, nz = 1;
    double dx = 1.0, dy = 1.0, dz = 1.0;
    double x0 = 0.0, y0 = 0.0, z0 = 0.0;  // lower corner

    long cell_count() const { return static_cast<long>(nx) * ny * nz; }
    double cell_volume() const { return dx * dy * dz; }
    long index(int i, int j, int k) const {
        return i + static_cast<long>(nx) * (j + static_cast<long>(ny) * k);
    }
    double xc(int i) const { return x0 + (i + 0.5) * dx; }
    double yc(int j) const { return y0 + (j + 0.5) * dy; }
    double zc(int k) const { return z0 + (k + 0.5) * dz; }
    double x_max() const { return x0 + nx * dx; }
    double y_max() const { return y0 + ny * dy; }
    double z_max() const { return z0 + nz * dz; }
    bool two_d() const { return ny == 1; }
};

/// z-layer split of the slow domain (grid 2). The buffer is the contiguous
/// band of `buffer_layers` element layers touching the interface (its bottom);
/// the remaining `slow_layers` above it form the slow region. Grid 1 is fast
/// in its entirety.
struct RegionPartition {
    int buffer_layers = 6;
    int slow_layers = 0;
};

struct BoxSpec {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    double z_min = 0.0, z_max = 1.0;
    int nx = 1, ny = 1, nz = 1;
};

struct DomainConfig {
    BoxSpec lower;  // domain 1, below the interface (z_max must be 0)
    BoxSpec upper;  // domain 2, above the interface (z_min must be 0)
    int buffer_layers = 6;
};

struct CoupledDomain {
    StructuredGrid grid1;
    StructuredGrid grid2;
    RegionPartition partition;
};

namespace detail {
inline StructuredGrid make_grid(const BoxSpec& b) {
    if (b.nx < 1 || b.ny < 1 || b.nz < 1)
        throw std::invalid_argument("grid: element counts must be >= 1");
    if (!(b.x_max > b.x_min) || !(b.y_max > b.y_min) || !(b.z_max > b.z_min))
        throw std::invalid_argument("grid: box extents must have positive size");
    StructuredGrid g;
    g.nx = b.nx; g.ny = b.ny; g.nz = b.nz;
    g.x0 = b.x_min; g.y0 = b.y_min; g.z0 = b.z_min;
    g.dx = (b.x_max - b.x_min) / b.nx;
    g.dy = (b.y_max - b.y_min) / b.ny;
    g.dz = (b.z_max - b.z_min) / b.nz;
    return g;
}
}  // namespace detail

/// Two grids sharing the interface plane z=0 with a conformal horizontal
/// discretization, plus the fast/buffer/slow partition.
inline CoupledDomain build_coupled_domain(const DomainConfig& cfg) {
    if (cfg.lower.z_max != 0.0 || cfg.upper.z_min != 0.0)
        throw std::invalid_argument("coupled domain: interface plane must be z=0 "
                                    "(lower.z_max == upper.z_min == 0)");
    if (cfg.lower.nx != cfg.upper.nx || cfg.lower.ny != cfg.upper.ny)
        throw std::invalid_argument("coupled domain: horizontal element counts must match "
                                    "across the interface");
    if (cfg.lower.x_min != cfg.upper.x_min || cfg.lower.x_max != cfg.upper.x_max ||
        cfg.lower.y_min != cfg.upper.y_min || cfg.lower.y_max != cfg.upper.y_max)
        throw std::invalid_argument("coupled domain: horizontal extents must match "
                                    "across the interface");
    if (cfg.buffer_layers < 1)
        throw std::invalid_argument("coupled domain: buffer depth must be >= 1 layer");
    if (cfg.buffer_layers > cfg.upper.nz)
        throw std::invalid_argument("coupled domain: buffer depth exceeds the vertical "
                                    "element count of domain 2");

    CoupledDomain dom;
    dom.grid1 = detail::make_grid(cfg.lower);
    dom.grid2 = detail::make_grid(cfg.upper);
    dom.partition.buffer_layers = cfg.buffer_layers;
    dom.partition.slow_layers = cfg.upper.nz - cfg.buffer_layers;
    return dom;
}

struct RegionCounts {
    long slow = 0, buffer = 0, fast = 0;
    long total() const { return slow + buffer + fast; }
};

inline RegionCounts region_element_counts(const RegionPartition& part,
                                          const StructuredGrid& grid1,
                                          const StructuredGrid& grid2) {
    if (part.buffer_layers + part.slow_layers != grid2.nz)
        throw std::invalid_argument("region counts: partition does not cover domain 2");
    RegionCounts c;
    const long plane2 = static_cast<long>(grid2.nx) * grid2.ny;
    c.fast = grid1.cell_count();
    c.buffer = plane2 * part.buffer_layers;
    c.slow = plane2 * part.slow_layers;
    return c;
}

/// Per-element averages of the five conserved variables on one grid,
/// component-interleaved. Disjoint per-element writes are thread safe.
struct ConservedField {
    int nx = 0, ny = 0, nz = 0;
    std::vector<double> data;

    ConservedField() = default;
    explicit ConservedField(const StructuredGrid& g) : nx(g.nx), ny(g.ny), nz(g.nz) {
        data.assign(static_cast<std::size_t>(kVars) * g.cell_count(), 0.0);
    }

    long cell_count() const { return static_cast<long>(nx) * ny * nz; }
    long index(int i, int j, int k) const {
        return i + static_cast<long>(nx) * (j + static_cast<long>(ny) * k);
    }
    double* cell(long e) { return data.data() + static_cast<std::size_t>(kVars) * e; }
    const double* cell(long e) const { return data.data() + static_cast<std::size_t>(kVars) * e; }
    bool same_shape(const ConservedField& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz;
    }
};

/// Pair of conserved fields plus the simulation clock.
struct CoupledState {
    ConservedField field1;
    ConservedField field2;
    double time = 0.0;
};

/// Index of the first cell with non-positive density or derived pressure,
/// or nullopt if the whole field is physically valid.
inline std::optional<long> first_invalid_cell(const ConservedField& f, const FluidParams& par) {
    const long n = f.cell_count();
    for (long e = 0; e < n; ++e) {
        const double* q = f.cell(e);
        if (!(q[0] > 0.0)) return e;
        const double ke = 0.5 * (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]) / q[0];
        if (!((par.gamma - 1.0) * (q[4] - ke) > 0.0)) return e;
    }
    return std::nullopt;
}

}  // namespace mrflow

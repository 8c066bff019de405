#pragma once

#include "tempoflow/core/ndarray.hpp"

namespace tempoflow {

/// Regular 4D voxel grid: spatial counts, frame count, voxel size and frame spacing.
struct Grid4D {
    std::size_t nx = 1, ny = 1, nz = 1;
    std::size_t nt = 1;
    double dx = 1.0;  ///< voxel edge length [mm], isotropic
    double dt = 1.0;  ///< frame spacing [ms]

    std::size_t voxels() const { return nx * ny * nz; }

    void validate() const {
        require(nx >= 1 && ny >= 1 && nz >= 1 && nt >= 1, "Grid4D: all counts must be >= 1");
        require(dx > 0.0, "Grid4D: dx must be > 0");
        require(dt > 0.0, "Grid4D: dt must be > 0");
    }

    bool operator==(const Grid4D& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && nt == o.nt && dx == o.dx && dt == o.dt;
    }
};

/// Time-resolved three-component velocity plus magnitude on a regular grid.
/// v is [3][nt][nx][ny][nz] in m/s, magnitude [nt][nx][ny][nz] (arbitrary units),
/// fluid_mask [nx][ny][nz] (static over the cycle).
struct VelocityField4D {
    Grid4D grid;
    NdArray<float> v;
    NdArray<float> magnitude;
    NdArray<std::uint8_t> fluid_mask;

    static VelocityField4D zeros(const Grid4D& g) {
        g.validate();
        VelocityField4D f;
        f.grid = g;
        f.v = NdArray<float>({3, g.nt, g.nx, g.ny, g.nz});
        f.magnitude = NdArray<float>({g.nt, g.nx, g.ny, g.nz});
        f.fluid_mask = NdArray<std::uint8_t>({g.nx, g.ny, g.nz});
        return f;
    }

    void validate() const {
        grid.validate();
        require(v.shape() == std::vector<std::size_t>{3, grid.nt, grid.nx, grid.ny, grid.nz},
                "VelocityField4D: v shape mismatch");
        require(magnitude.shape() == std::vector<std::size_t>{grid.nt, grid.nx, grid.ny, grid.nz},
                "VelocityField4D: magnitude shape mismatch");
        require(fluid_mask.shape() == std::vector<std::size_t>{grid.nx, grid.ny, grid.nz},
                "VelocityField4D: fluid_mask shape mismatch");
        for (float m : magnitude) require(m >= 0.0f, "VelocityField4D: magnitude must be non-negative");
    }
};

/// Single complex-valued spatial volume [nx][ny][nz].
template <typename T>
using ComplexVolumeT = NdArray<std::complex<T>>;

using ComplexVolume = ComplexVolumeT<float>;

} // namespace tempoflow

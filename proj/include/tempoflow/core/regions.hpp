#pragma once

#include "tempoflow/core/ndarray.hpp"

namespace tempoflow {

enum class RegionLabel : std::uint8_t { NonFluid = 0, FluidCore = 1, FluidBoundary = 2 };

/// Per-voxel region labels: fluid interior, fluid boundary (six-connected to a
/// non-fluid voxel or to the volume edge), and non-fluid background.
struct RegionLabels {
    NdArray<std::uint8_t> labels;  // [nx][ny][nz], values from RegionLabel

    RegionLabel at(std::size_t x, std::size_t y, std::size_t z) const {
        return static_cast<RegionLabel>(labels(x, y, z));
    }
};

/// Split a fluid mask into core and boundary voxels. A fluid voxel is boundary
/// if any of its six face neighbors is non-fluid; voxels on the volume edge
/// count as having a non-fluid neighbor.
inline RegionLabels classify_regions(const NdArray<std::uint8_t>& mask) {
    require(mask.ndim() == 3, "classify_regions: expected a 3D mask");
    const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(mask.dim(0));
    const std::ptrdiff_t ny = static_cast<std::ptrdiff_t>(mask.dim(1));
    const std::ptrdiff_t nz = static_cast<std::ptrdiff_t>(mask.dim(2));

    RegionLabels out;
    out.labels = NdArray<std::uint8_t>(mask.shape());

    auto fluid = [&](std::ptrdiff_t x, std::ptrdiff_t y, std::ptrdiff_t z) -> bool {
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return false;
        return mask(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z)) != 0;
    };

    for (std::ptrdiff_t x = 0; x < nx; ++x)
        for (std::ptrdiff_t y = 0; y < ny; ++y)
            for (std::ptrdiff_t z = 0; z < nz; ++z) {
                if (!fluid(x, y, z)) {
                    out.labels(x, y, z) = static_cast<std::uint8_t>(RegionLabel::NonFluid);
                    continue;
                }
                const bool boundary = !fluid(x - 1, y, z) || !fluid(x + 1, y, z) ||
                                      !fluid(x, y - 1, z) || !fluid(x, y + 1, z) ||
                                      !fluid(x, y, z - 1) || !fluid(x, y, z + 1);
                out.labels(x, y, z) = static_cast<std::uint8_t>(boundary ? RegionLabel::FluidBoundary
                                                                         : RegionLabel::FluidCore);
            }
    return out;
}

} // namespace tempoflow

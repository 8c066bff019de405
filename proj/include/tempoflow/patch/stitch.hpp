#pragma once

#include <cstdint>
#include <vector>

#include "tempoflow/core/parallel.hpp"
#include "tempoflow/patch/patch.hpp"

namespace tempoflow {

constexpr std::size_t kPatchOverlap = 4;
constexpr std::size_t kPatchStride = kPatchSize - kPatchOverlap;  // 12

/// Window start offsets covering `extent` with stride 12 and the final
/// window clamped to the boundary.
inline std::vector<std::size_t> tiling_offsets(std::size_t extent, std::size_t window = kPatchSize,
                                               std::size_t stride = kPatchStride) {
    require(extent >= window, "tiling_offsets: extent smaller than the window");
    std::vector<std::size_t> offsets;
    for (std::size_t o = 0;; o += stride) {
        if (o + window >= extent) {
            offsets.push_back(extent - window);
            break;
        }
        offsets.push_back(o);
    }
    return offsets;
}

struct TilePlanEntry {
    Orientation orientation;
    std::size_t origin0;
    std::size_t origin1;
};

/// In-plane tile origins for each orientation. Slices along the out-of-plane
/// axis and temporal windows enumerate separately (every slice is visited, so
/// each voxel is covered at least once per orientation).
inline std::vector<TilePlanEntry> plan_inference_tiling(const Grid4D& grid) {
    grid.validate();
    require(grid.nx >= kPatchSize && grid.ny >= kPatchSize && grid.nz >= kPatchSize,
            "plan_inference_tiling: grid smaller than a patch");
    const std::size_t extent[3] = {grid.nx, grid.ny, grid.nz};
    std::vector<TilePlanEntry> plan;
    for (int o = 0; o < 3; ++o) {
        const PatchAxes ax = axes_of(static_cast<Orientation>(o));
        for (auto o0 : tiling_offsets(extent[ax.a0]))
            for (auto o1 : tiling_offsets(extent[ax.a1]))
                plan.push_back({static_cast<Orientation>(o), o0, o1});
    }
    return plan;
}

/// One network prediction placed back into the HR volume.
struct PlacedPrediction {
    NdArray<float> hr;  // [3][16][16][32], patch-local component order
    Orientation orientation = Orientation::XY;
    std::size_t origin0 = 0;
    std::size_t origin1 = 0;
    std::size_t slice = 0;
    std::size_t frame_lr = 0;  ///< HR window starts at 2 * frame_lr
};

/// Uniform-mean overlap stitching across tiles, temporal windows and
/// orientations. Every voxel/frame must be covered by at least one patch.
inline VelocityField4D stitch(const std::vector<PlacedPrediction>& predictions, const Grid4D& hr_grid,
                              const NdArray<std::uint8_t>& fluid_mask) {
    hr_grid.validate();
    require(!predictions.empty(), "stitch: no predictions");
    require(fluid_mask.ndim() == 3 && fluid_mask.dim(0) == hr_grid.nx &&
                fluid_mask.dim(1) == hr_grid.ny && fluid_mask.dim(2) == hr_grid.nz,
            "stitch: fluid mask does not match grid");

    const std::size_t nvox = hr_grid.voxels();
    const std::size_t nt = hr_grid.nt;
    NdArray<double> acc({3, nt, hr_grid.nx, hr_grid.ny, hr_grid.nz});
    acc.fill(0.0);
    NdArray<std::uint32_t> cover({nt, hr_grid.nx, hr_grid.ny, hr_grid.nz});
    cover.fill(0);

    const std::size_t extent[3] = {hr_grid.nx, hr_grid.ny, hr_grid.nz};
    for (const auto& pred : predictions) {
        require(pred.hr.ndim() == 4 && pred.hr.dim(0) == 3 && pred.hr.dim(1) == kPatchSize &&
                    pred.hr.dim(2) == kPatchSize && pred.hr.dim(3) == kPatchFramesHr,
                "stitch: prediction has wrong shape");
        const PatchAxes ax = axes_of(pred.orientation);
        require(pred.origin0 + kPatchSize <= extent[ax.a0] &&
                    pred.origin1 + kPatchSize <= extent[ax.a1] && pred.slice < extent[ax.out] &&
                    2 * pred.frame_lr + kPatchFramesHr <= nt,
                "stitch: prediction outside grid");
        const std::size_t comp_of[3] = {ax.a0, ax.a1, ax.out};
        for (std::size_t r = 0; r < kPatchSize; ++r)
            for (std::size_t c = 0; c < kPatchSize; ++c) {
                const std::size_t vox =
                    detail::global_voxel(hr_grid, ax, r, c, pred.slice, pred.origin0, pred.origin1);
                for (std::size_t t = 0; t < kPatchFramesHr; ++t) {
                    const std::size_t th = 2 * pred.frame_lr + t;
                    for (std::size_t k = 0; k < 3; ++k)
                        acc[(comp_of[k] * nt + th) * nvox + vox] += pred.hr(k, r, c, t);
                    ++cover[th * nvox + vox];
                }
            }
    }

    for (std::size_t i = 0; i < cover.size(); ++i)
        require(cover[i] > 0, "stitch: tiling left voxels uncovered");

    VelocityField4D out = VelocityField4D::zeros(hr_grid);
    out.fluid_mask = fluid_mask;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < nt * nvox; ++i)
            out.v[c * nt * nvox + i] =
                static_cast<float>(acc[c * nt * nvox + i] / cover[i]);
    return out;
}

} // namespace tempoflow

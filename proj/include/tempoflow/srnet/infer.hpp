#pragma once

#include <vector>

#include "tempoflow/baselines/interp.hpp"
#include "tempoflow/core/parallel.hpp"
#include "tempoflow/patch/patch.hpp"
#include "tempoflow/patch/stitch.hpp"
#include "tempoflow/srnet/network.hpp"

namespace tempoflow {

/// LR channel stack for one tile, matching the `lr` tensor of cut_patch bit
/// for bit (velocities in patch-local component order).
inline NdArray<float> cut_lr_channels(const VelocityField4D& lr_field, const ChannelVolumes& ch,
                                      Orientation o, std::size_t o0, std::size_t o1,
                                      std::size_t slice, std::size_t frame_lr) {
    const Grid4D& gl = lr_field.grid;
    const PatchAxes ax = axes_of(o);
    const std::size_t extent[3] = {gl.nx, gl.ny, gl.nz};
    require(o0 + kPatchSize <= extent[ax.a0] && o1 + kPatchSize <= extent[ax.a1],
            "cut_lr_channels: window exceeds grid");
    require(slice < extent[ax.out], "cut_lr_channels: slice outside grid");
    require(frame_lr + kPatchFramesLr <= gl.nt, "cut_lr_channels: LR frame window exceeds field");

    NdArray<float> lr({kChannelsIn, kPatchSize, kPatchSize, kPatchFramesLr});
    const std::size_t nvox = gl.voxels();
    const std::size_t comp_of[3] = {ax.a0, ax.a1, ax.out};
    for (std::size_t r = 0; r < kPatchSize; ++r)
        for (std::size_t c = 0; c < kPatchSize; ++c) {
            const std::size_t vox = detail::global_voxel(gl, ax, r, c, slice, o0, o1);
            for (std::size_t t = 0; t < kPatchFramesLr; ++t) {
                const std::size_t tl = frame_lr + t;
                for (std::size_t k = 0; k < 3; ++k)
                    lr(k, r, c, t) = lr_field.v[(comp_of[k] * gl.nt + tl) * nvox + vox];
                lr(3, r, c, t) = ch.magnitude_norm[tl * nvox + vox];
                lr(4, r, c, t) = ch.speed[tl * nvox + vox];
                lr(5, r, c, t) = ch.pcmra[vox];
            }
        }
    return lr;
}

/// Tiled single-field inference: every slice of all three orientations is
/// predicted and overlap-averaged into one HR field at twice the frame rate.
/// The magnitude channel is not a network output and is carried over by
/// linear temporal interpolation.
inline VelocityField4D infer_field(const NetworkParams& params, const VelocityField4D& lr_field) {
    lr_field.validate();
    params.config.validate();
    require(params.config.c_in == kChannelsIn && params.config.c_out == 3,
            "infer_field: network shape does not match the patch layout");
    const Grid4D& gl = lr_field.grid;
    require(gl.nx >= kPatchSize && gl.ny >= kPatchSize && gl.nz >= kPatchSize,
            "infer_field: grid smaller than a patch");
    require(gl.nt >= kPatchFramesLr, "infer_field: need at least 16 LR frames");

    const ChannelVolumes ch = build_channel_volumes(lr_field);
    const std::vector<std::size_t> frames = tiling_offsets(gl.nt, kPatchFramesLr, kPatchStride);
    const std::vector<TilePlanEntry> plan = plan_inference_tiling(gl);
    const std::size_t extent[3] = {gl.nx, gl.ny, gl.nz};

    struct Job {
        TilePlanEntry tile;
        std::size_t slice;
        std::size_t frame_lr;
    };
    std::vector<Job> jobs;
    for (const auto& tile : plan) {
        const PatchAxes ax = axes_of(tile.orientation);
        for (std::size_t slice = 0; slice < extent[ax.out]; ++slice)
            for (auto f : frames) jobs.push_back({tile, slice, f});
    }

    std::vector<PlacedPrediction> predictions(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& j = jobs[i];
        const NdArray<float> lr = cut_lr_channels(lr_field, ch, j.tile.orientation, j.tile.origin0,
                                                  j.tile.origin1, j.slice, j.frame_lr);
        ForwardTrace<float> tr;
        PlacedPrediction& p = predictions[i];
        p.hr = forward(params, lr, tr);
        p.orientation = j.tile.orientation;
        p.origin0 = j.tile.origin0;
        p.origin1 = j.tile.origin1;
        p.slice = j.slice;
        p.frame_lr = j.frame_lr;
    });

    Grid4D hr_grid = gl;
    hr_grid.nt = 2 * gl.nt;
    hr_grid.dt = gl.dt / 2.0;
    VelocityField4D out = stitch(predictions, hr_grid, lr_field.fluid_mask);
    out.magnitude = linear_interp_time(lr_field, 2).magnitude;
    out.validate();
    return out;
}

} // namespace tempoflow

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tempoflow/core/grid.hpp"
#include "tempoflow/core/rng.hpp"

namespace tempoflow {

constexpr std::size_t kPatchSize = 16;       // in-plane voxels per side
constexpr std::size_t kPatchFramesLr = 16;   // LR temporal extent
constexpr std::size_t kPatchFramesHr = 32;   // HR temporal extent (2x)
constexpr std::size_t kChannelsIn = 6;       // v1, v2, v3, magnitude, speed, PC-MRA
constexpr double kFluidFractionMin = 0.2;

enum class Orientation { XY = 0, XZ = 1, YZ = 2 };

struct PatchAxes {
    std::size_t a0;   ///< global axis of patch rows
    std::size_t a1;   ///< global axis of patch columns
    std::size_t out;  ///< global axis normal to the slice
};

inline PatchAxes axes_of(Orientation o) {
    switch (o) {
        case Orientation::XY: return {0, 1, 2};
        case Orientation::XZ: return {0, 2, 1};
        default: return {1, 2, 0};
    }
}

inline std::string orientation_name(Orientation o) {
    switch (o) {
        case Orientation::XY: return "xy";
        case Orientation::XZ: return "xz";
        default: return "yz";
    }
}

struct AugmentSpec {
    int rotation = 0;       ///< quarter turns CCW in the (row, col) plane: 0..3
    bool flip_h = false;    ///< mirror columns
    bool flip_v = false;    ///< mirror rows
    bool negate_velocity = false;
    bool swap_components = false;  ///< transpose + swap in-plane velocity channels

    bool is_identity() const {
        return rotation == 0 && !flip_h && !flip_v && !negate_velocity && !swap_components;
    }
};

struct PatchPair {
    NdArray<float> lr;           // [6][16][16][16] channels x row x col x time
    NdArray<float> hr;           // [3][16][16][32]
    NdArray<std::uint8_t> mask;  // [16][16] in-plane fluid mask
    Orientation orientation = Orientation::XY;
    std::size_t origin0 = 0;     ///< window start along patch rows (global axis a0)
    std::size_t origin1 = 0;     ///< window start along patch columns (global axis a1)
    std::size_t slice = 0;       ///< position along the out-of-plane axis
    std::size_t frame_lr = 0;    ///< LR window start; HR window starts at 2x
    double fluid_fraction = 0.0;
    AugmentSpec augment;
};

/// Per-field channel volumes shared by every patch cut from the field.
struct ChannelVolumes {
    NdArray<float> magnitude_norm;  // [nt][nx][ny][nz], scaled to [0,1]
    NdArray<float> speed;           // [nt][nx][ny][nz], m/s
    NdArray<float> pcmra;           // [nx][ny][nz], time-mean of m*|v|, scaled to [0,1]
};

inline ChannelVolumes build_channel_volumes(const VelocityField4D& field) {
    field.validate();
    const Grid4D& g = field.grid;
    const std::size_t nvox = g.voxels();

    ChannelVolumes ch;
    ch.magnitude_norm = field.magnitude;
    ch.speed = NdArray<float>({g.nt, g.nx, g.ny, g.nz});
    ch.pcmra = NdArray<float>({g.nx, g.ny, g.nz});
    ch.pcmra.fill(0.0f);

    for (std::size_t t = 0; t < g.nt; ++t)
        for (std::size_t p = 0; p < nvox; ++p) {
            double ss = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = field.v[(c * g.nt + t) * nvox + p];
                ss += v * v;
            }
            const float speed = static_cast<float>(std::sqrt(ss));
            ch.speed[t * nvox + p] = speed;
            ch.pcmra[p] += field.magnitude[t * nvox + p] * speed;
        }
    for (auto& v : ch.pcmra) v /= static_cast<float>(g.nt);

    auto normalize = [](NdArray<float>& a) {
        float peak = 0.0f;
        for (auto v : a) peak = std::max(peak, v);
        if (peak > 0.0f)
            for (auto& v : a) v /= peak;
    };
    normalize(ch.magnitude_norm);
    normalize(ch.pcmra);
    return ch;
}

namespace detail {

/// Map patch-local (row, col, slice) to the global flat voxel index.
inline std::size_t global_voxel(const Grid4D& g, const PatchAxes& ax, std::size_t r, std::size_t c,
                                std::size_t slice, std::size_t o0, std::size_t o1) {
    std::size_t idx[3];
    idx[ax.a0] = o0 + r;
    idx[ax.a1] = o1 + c;
    idx[ax.out] = slice;
    return (idx[0] * g.ny + idx[1]) * g.nz + idx[2];
}

} // namespace detail

/// Fraction of fluid voxels in the 16x16 in-plane window (the mask is static,
/// so "over time" reduces to the spatial count).
inline double patch_fluid_fraction(const NdArray<std::uint8_t>& mask, const Grid4D& g, Orientation o,
                                   std::size_t o0, std::size_t o1, std::size_t slice) {
    const PatchAxes ax = axes_of(o);
    std::size_t count = 0;
    for (std::size_t r = 0; r < kPatchSize; ++r)
        for (std::size_t c = 0; c < kPatchSize; ++c)
            count += mask[detail::global_voxel(g, ax, r, c, slice, o0, o1)];
    return static_cast<double>(count) / static_cast<double>(kPatchSize * kPatchSize);
}

/// Cut one LR/HR patch pair. Velocity channels are reordered to patch-local
/// axes (v1 = along rows, v2 = along columns, v3 = out of plane).
inline PatchPair cut_patch(const VelocityField4D& lr_field, const ChannelVolumes& ch,
                           const VelocityField4D& hr_field, Orientation o, std::size_t o0,
                           std::size_t o1, std::size_t slice, std::size_t frame_lr) {
    const Grid4D& gl = lr_field.grid;
    const Grid4D& gh = hr_field.grid;
    require(gh.nt == 2 * gl.nt && gh.nx == gl.nx && gh.ny == gl.ny && gh.nz == gl.nz,
            "cut_patch: HR field must match LR spatially at 2x frame rate");
    const PatchAxes ax = axes_of(o);
    const std::size_t extent[3] = {gl.nx, gl.ny, gl.nz};
    require(o0 + kPatchSize <= extent[ax.a0] && o1 + kPatchSize <= extent[ax.a1],
            "cut_patch: window exceeds grid");
    require(slice < extent[ax.out], "cut_patch: slice outside grid");
    require(frame_lr + kPatchFramesLr <= gl.nt, "cut_patch: LR frame window exceeds field");

    PatchPair p;
    p.orientation = o;
    p.origin0 = o0;
    p.origin1 = o1;
    p.slice = slice;
    p.frame_lr = frame_lr;
    p.lr = NdArray<float>({kChannelsIn, kPatchSize, kPatchSize, kPatchFramesLr});
    p.hr = NdArray<float>({3, kPatchSize, kPatchSize, kPatchFramesHr});
    p.mask = NdArray<std::uint8_t>({kPatchSize, kPatchSize});

    const std::size_t nvox = gl.voxels();
    const std::size_t comp_of[3] = {ax.a0, ax.a1, ax.out};
    for (std::size_t r = 0; r < kPatchSize; ++r)
        for (std::size_t c = 0; c < kPatchSize; ++c) {
            const std::size_t vox = detail::global_voxel(gl, ax, r, c, slice, o0, o1);
            p.mask(r, c) = lr_field.fluid_mask[vox];
            for (std::size_t t = 0; t < kPatchFramesLr; ++t) {
                const std::size_t tl = frame_lr + t;
                for (std::size_t k = 0; k < 3; ++k)
                    p.lr(k, r, c, t) = lr_field.v[(comp_of[k] * gl.nt + tl) * nvox + vox];
                p.lr(3, r, c, t) = ch.magnitude_norm[tl * nvox + vox];
                p.lr(4, r, c, t) = ch.speed[tl * nvox + vox];
                p.lr(5, r, c, t) = ch.pcmra[vox];
            }
            for (std::size_t t = 0; t < kPatchFramesHr; ++t) {
                const std::size_t th = 2 * frame_lr + t;
                for (std::size_t k = 0; k < 3; ++k)
                    p.hr(k, r, c, t) = hr_field.v[(comp_of[k] * gh.nt + th) * nvox + vox];
            }
        }
    p.fluid_fraction = patch_fluid_fraction(lr_field.fluid_mask, gl, o, o0, o1, slice);
    return p;
}

namespace detail {

/// Spatial in-plane index maps shared by all patch tensors.
template <typename T>
NdArray<T> transform_plane(const NdArray<T>& in, int rotation, bool flip_h, bool flip_v,
                           bool transpose) {
    // dims [..., rows, cols, time] with rows == cols
    const std::size_t rank = in.ndim();
    const std::size_t n = in.dim(rank - 3);
    NdArray<T> out(in.shape());
    const std::size_t outer = in.size() / (in.dim(rank - 3) * in.dim(rank - 2) * in.dim(rank - 1));
    const std::size_t nt = in.dim(rank - 1);
    const std::size_t plane = n * n * nt;
    for (std::size_t ch = 0; ch < outer; ++ch)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                // walk the inverse maps back to the source cell
                std::size_t sr = r, sc = c;
                if (transpose) std::swap(sr, sc);
                if (flip_v) sr = n - 1 - sr;
                if (flip_h) sc = n - 1 - sc;
                for (int q = 0; q < rotation; ++q) {
                    // inverse of CCW: (r, c) <- (c, n-1-r) applied per quarter
                    const std::size_t tr = sc;
                    const std::size_t tc = n - 1 - sr;
                    sr = tr;
                    sc = tc;
                }
                const T* src = in.data() + ch * plane + (sr * n + sc) * nt;
                T* dst = out.data() + ch * plane + (r * n + c) * nt;
                std::copy_n(src, nt, dst);
            }
    return out;
}

} // namespace detail

/// Apply an augmentation to both tensors of a patch pair. Spatial maps act
/// identically on every channel; the in-plane velocity channels additionally
/// transform covariantly (rotation matrix, mirror negation, swap).
inline PatchPair augment(const PatchPair& p, const AugmentSpec& a) {
    require(a.rotation >= 0 && a.rotation < 4, "augment: rotation must be 0..3 quarter turns");
    if (a.is_identity()) return p;

    PatchPair out = p;
    out.augment = a;
    out.lr = detail::transform_plane(p.lr, a.rotation, a.flip_h, a.flip_v, a.swap_components);
    out.hr = detail::transform_plane(p.hr, a.rotation, a.flip_h, a.flip_v, a.swap_components);
    {
        // mask has no time axis; give it a singleton one for the shared map
        NdArray<std::uint8_t> m({kPatchSize, kPatchSize, 1});
        std::copy_n(p.mask.data(), p.mask.size(), m.data());
        m = detail::transform_plane(m, a.rotation, a.flip_h, a.flip_v, a.swap_components);
        std::copy_n(m.data(), out.mask.size(), out.mask.data());
    }

    // channel algebra for (v1, v2): rotation (v1,v2)->(-v2,v1) per quarter,
    // then mirrors negate their axis, then global negation, then swap
    auto rotate_channels = [&](NdArray<float>& t, std::size_t plane) {
        float* v1 = t.data();
        float* v2 = t.data() + plane;
        for (int q = 0; q < a.rotation; ++q)
            for (std::size_t i = 0; i < plane; ++i) {
                const float nv1 = -v2[i];
                v2[i] = v1[i];
                v1[i] = nv1;
            }
        if (a.flip_v)
            for (std::size_t i = 0; i < plane; ++i) v1[i] = -v1[i];
        if (a.flip_h)
            for (std::size_t i = 0; i < plane; ++i) v2[i] = -v2[i];
        if (a.negate_velocity)
            for (std::size_t i = 0; i < 3 * plane; ++i) t[i] = -t[i];
        if (a.swap_components)
            for (std::size_t i = 0; i < plane; ++i) std::swap(v1[i], v2[i]);
    };
    rotate_channels(out.lr, kPatchSize * kPatchSize * kPatchFramesLr);
    rotate_channels(out.hr, kPatchSize * kPatchSize * kPatchFramesHr);
    return out;
}

/// In-plane 2x2 integer matrix of an augmentation (acting on both patch
/// coordinates and the (v1, v2) velocity pair; the group is dihedral).
struct AugmentMatrix {
    int m[2][2];
    bool operator==(const AugmentMatrix& o) const {
        return m[0][0] == o.m[0][0] && m[0][1] == o.m[0][1] && m[1][0] == o.m[1][0] &&
               m[1][1] == o.m[1][1];
    }
};

inline AugmentMatrix augment_matrix(const AugmentSpec& a) {
    auto mul = [](AugmentMatrix x, AugmentMatrix y) {
        AugmentMatrix r{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = x.m[i][0] * y.m[0][j] + x.m[i][1] * y.m[1][j];
        return r;
    };
    AugmentMatrix m{{{1, 0}, {0, 1}}};
    const AugmentMatrix rot{{{0, -1}, {1, 0}}};       // CCW quarter turn
    for (int q = 0; q < a.rotation; ++q) m = mul(rot, m);
    if (a.flip_v) m = mul(AugmentMatrix{{{-1, 0}, {0, 1}}}, m);
    if (a.flip_h) m = mul(AugmentMatrix{{{1, 0}, {0, -1}}}, m);
    if (a.swap_components) m = mul(AugmentMatrix{{{0, 1}, {1, 0}}}, m);
    return m;
}

/// The spec whose transform undoes `a` (exact: the in-plane maps are
/// orthogonal, so the inverse matrix is the transpose; negation is its own
/// inverse and commutes with everything).
inline AugmentSpec inverse_augment(const AugmentSpec& a) {
    AugmentMatrix target = augment_matrix(a);
    std::swap(target.m[0][1], target.m[1][0]);  // transpose = inverse
    for (int swap = 0; swap < 2; ++swap)
        for (int flip = 0; flip < 2; ++flip)
            for (int rot = 0; rot < 4; ++rot) {
                AugmentSpec cand;
                cand.rotation = rot;
                cand.flip_h = flip != 0;
                cand.swap_components = swap != 0;
                cand.negate_velocity = a.negate_velocity;
                if (augment_matrix(cand) == target) return cand;
            }
    throw std::logic_error("inverse_augment: dihedral decomposition failed");
}

struct ExtractConfig {
    std::size_t n_patches = 256;
    std::size_t patches_per_iteration = 16;  ///< 1 of which is the low-fluid patch
    std::size_t max_attempts = 400;          ///< rejection bound per draw
};

/// Randomly sample patch pairs: each iteration draws patches with
/// fluid_fraction >= 0.2 plus exactly one with < 0.2 (when the mask allows),
/// across random orientations, slices and in-plane origins.
inline std::vector<PatchPair> extract_patch_pairs(const VelocityField4D& lr_field,
                                                  const VelocityField4D& hr_field,
                                                  const ExtractConfig& cfg, std::uint64_t seed) {
    require(cfg.n_patches >= 1, "extract_patch_pairs: need at least one patch");
    require(cfg.patches_per_iteration >= 2, "extract_patch_pairs: iteration must hold >= 2 patches");
    const Grid4D& g = lr_field.grid;
    require(g.nx >= kPatchSize && g.ny >= kPatchSize && g.nz >= kPatchSize,
            "extract_patch_pairs: domain smaller than a patch");
    require(g.nt >= kPatchFramesLr, "extract_patch_pairs: too few LR frames");
    bool any_fluid = false;
    for (auto m : lr_field.fluid_mask)
        if (m) any_fluid = true;
    require(any_fluid, "extract_patch_pairs: fluid mask is empty");

    const ChannelVolumes ch = build_channel_volumes(lr_field);
    auto rng = substream(seed, "patch-extract");
    std::uniform_int_distribution<int> pick_orient(0, 2);
    const std::size_t extent[3] = {g.nx, g.ny, g.nz};

    auto draw = [&]() {
        const Orientation o = static_cast<Orientation>(pick_orient(rng));
        const PatchAxes ax = axes_of(o);
        std::uniform_int_distribution<std::size_t> pick0(0, extent[ax.a0] - kPatchSize);
        std::uniform_int_distribution<std::size_t> pick1(0, extent[ax.a1] - kPatchSize);
        std::uniform_int_distribution<std::size_t> pick_slice(0, extent[ax.out] - 1);
        std::uniform_int_distribution<std::size_t> pick_frame(0, g.nt - kPatchFramesLr);
        struct Draw {
            Orientation o;
            std::size_t o0, o1, slice, frame;
            double fluid;
        } d;
        d.o = o;
        d.o0 = pick0(rng);
        d.o1 = pick1(rng);
        d.slice = pick_slice(rng);
        d.frame = pick_frame(rng);
        d.fluid = patch_fluid_fraction(lr_field.fluid_mask, g, o, d.o0, d.o1, d.slice);
        return d;
    };

    std::vector<PatchPair> patches;
    patches.reserve(cfg.n_patches);
    const std::size_t n_iterations =
        (cfg.n_patches + cfg.patches_per_iteration - 1) / cfg.patches_per_iteration;

    for (std::size_t it = 0; it < n_iterations && patches.size() < cfg.n_patches; ++it) {
        const std::size_t want_fluid =
            std::min(cfg.patches_per_iteration - 1, cfg.n_patches - patches.size());
        std::size_t got_fluid = 0;
        for (std::size_t n = 0; n < want_fluid; ++n) {
            for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
                const auto d = draw();
                if (d.fluid >= kFluidFractionMin) {
                    patches.push_back(cut_patch(lr_field, ch, hr_field, d.o, d.o0, d.o1, d.slice, d.frame));
                    ++got_fluid;
                    break;
                }
            }
        }
        if (patches.size() >= cfg.n_patches) break;
        // the designated low-fluid patch; an all-fluid mask yields a fluid one
        for (std::size_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
            const auto d = draw();
            if (d.fluid < kFluidFractionMin || attempt + 1 == cfg.max_attempts) {
                patches.push_back(cut_patch(lr_field, ch, hr_field, d.o, d.o0, d.o1, d.slice, d.frame));
                break;
            }
        }
    }
    require(patches.size() >= cfg.n_patches,
            "extract_patch_pairs: could not draw enough patches (mask too sparse for the "
            "fluid-fraction rule)");
    patches.resize(cfg.n_patches);
    return patches;
}

} // namespace tempoflow

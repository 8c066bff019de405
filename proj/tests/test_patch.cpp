#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <set>

#include "tempoflow/patch/dataset.hpp"
#include "tempoflow/patch/patch.hpp"
#include "tempoflow/patch/stitch.hpp"

using namespace tempoflow;

namespace {

/// LR field whose every velocity sample equals its own flat index (exact in
/// float), so cut_patch indexing can be checked against closed-form values.
VelocityField4D indexed_field(Grid4D g) {
    VelocityField4D f = VelocityField4D::zeros(g);
    for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = static_cast<float>(i % (1u << 22));
    for (std::size_t i = 0; i < f.magnitude.size(); ++i)
        f.magnitude[i] = 0.125f * static_cast<float>(i % 7 + 1);
    f.fluid_mask.fill(0);
    for (std::size_t i = 0; i < f.fluid_mask.size(); i += 3) f.fluid_mask[i] = 1;
    return f;
}

bool same_floats(const NdArray<float>& a, const NdArray<float>& b) {
    return a.shape() == b.shape() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

bool same_mask(const NdArray<std::uint8_t>& a, const NdArray<std::uint8_t>& b) {
    return a.shape() == b.shape() && std::memcmp(a.data(), b.data(), a.size()) == 0;
}

PatchPair constant_direction_patch(float v1, float v2, float v3) {
    PatchPair p;
    p.lr = NdArray<float>({kChannelsIn, kPatchSize, kPatchSize, kPatchFramesLr});
    p.hr = NdArray<float>({3, kPatchSize, kPatchSize, kPatchFramesHr});
    p.mask = NdArray<std::uint8_t>({kPatchSize, kPatchSize});
    p.mask.fill(1);
    p.lr.fill(0.5f);
    const std::size_t plane_lr = kPatchSize * kPatchSize * kPatchFramesLr;
    const std::size_t plane_hr = kPatchSize * kPatchSize * kPatchFramesHr;
    const float v[3] = {v1, v2, v3};
    for (std::size_t k = 0; k < 3; ++k) {
        std::fill_n(p.lr.data() + k * plane_lr, plane_lr, v[k]);
        std::fill_n(p.hr.data() + k * plane_hr, plane_hr, v[k]);
    }
    return p;
}

PatchPair random_patch(std::uint64_t seed) {
    PatchPair p;
    p.lr = NdArray<float>({kChannelsIn, kPatchSize, kPatchSize, kPatchFramesLr});
    p.hr = NdArray<float>({3, kPatchSize, kPatchSize, kPatchFramesHr});
    p.mask = NdArray<std::uint8_t>({kPatchSize, kPatchSize});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (auto& v : p.lr) v = u(rng);
    for (auto& v : p.hr) v = u(rng);
    for (auto& m : p.mask) m = rng() & 1;
    p.fluid_fraction = 0.625;
    return p;
}

} // namespace

TEST(ChannelVolumes, SpeedMagnitudeAndPcmraOracles) {
    Grid4D g{4, 3, 2, 2, 2.0, 40.0};
    VelocityField4D f = VelocityField4D::zeros(g);
    const std::size_t nvox = g.voxels();
    // voxel 5: v = (3, 4, 0) scaled by 0.1 at t=0 and (0, 0, 1) at t=1
    f.v[(0 * 2 + 0) * nvox + 5] = 0.3f;
    f.v[(1 * 2 + 0) * nvox + 5] = 0.4f;
    f.v[(2 * 2 + 1) * nvox + 5] = 1.0f;
    f.magnitude.fill(0.5f);
    f.magnitude[0 * nvox + 5] = 2.0f;  // peak magnitude
    f.fluid_mask[5] = 1;

    const ChannelVolumes ch = build_channel_volumes(f);
    EXPECT_FLOAT_EQ(ch.speed[0 * nvox + 5], 0.5f);
    EXPECT_FLOAT_EQ(ch.speed[1 * nvox + 5], 1.0f);
    EXPECT_FLOAT_EQ(ch.speed[0 * nvox + 0], 0.0f);
    // magnitude normalized by its global peak (2.0)
    EXPECT_FLOAT_EQ(ch.magnitude_norm[0 * nvox + 5], 1.0f);
    EXPECT_FLOAT_EQ(ch.magnitude_norm[1 * nvox + 5], 0.25f);
    // pcmra: voxel 5 time-mean of m*speed = (2*0.5 + 0.5*1)/2 = 0.75, the only
    // nonzero value, so it normalizes to 1; all others 0
    for (std::size_t p = 0; p < nvox; ++p)
        EXPECT_FLOAT_EQ(ch.pcmra[p], p == 5 ? 1.0f : 0.0f);
}

TEST(CutPatch, CopiesTheRightSamplesForEveryOrientation) {
    Grid4D gl{18, 20, 16, 16, 2.0, 40.0};
    Grid4D gh = gl;
    gh.nt = 32;
    gh.dt = 20.0;
    VelocityField4D lr = indexed_field(gl);
    VelocityField4D hr = indexed_field(gh);
    const ChannelVolumes ch = build_channel_volumes(lr);
    const std::size_t nvox = gl.voxels();

    struct Case {
        Orientation o;
        std::size_t o0, o1, slice, frame;
    };
    for (const Case tc : {Case{Orientation::XY, 1, 3, 5, 0}, Case{Orientation::XZ, 2, 0, 7, 0},
                          Case{Orientation::YZ, 4, 0, 9, 0}}) {
        const PatchAxes ax = axes_of(tc.o);
        PatchPair p = cut_patch(lr, ch, hr, tc.o, tc.o0, tc.o1, tc.slice, tc.frame);
        EXPECT_EQ(p.lr.shape(), (std::vector<std::size_t>{6, 16, 16, 16}));
        EXPECT_EQ(p.hr.shape(), (std::vector<std::size_t>{3, 16, 16, 32}));
        const std::size_t comp_of[3] = {ax.a0, ax.a1, ax.out};
        for (std::size_t r = 0; r < kPatchSize; r += 5)
            for (std::size_t c = 0; c < kPatchSize; c += 3) {
                std::size_t idx[3];
                idx[ax.a0] = tc.o0 + r;
                idx[ax.a1] = tc.o1 + c;
                idx[ax.out] = tc.slice;
                const std::size_t vox = (idx[0] * gl.ny + idx[1]) * gl.nz + idx[2];
                EXPECT_EQ(p.mask(r, c), lr.fluid_mask[vox]);
                for (std::size_t t = 0; t < kPatchFramesLr; t += 7) {
                    for (std::size_t k = 0; k < 3; ++k)
                        EXPECT_EQ(p.lr(k, r, c, t),
                                  lr.v[(comp_of[k] * gl.nt + tc.frame + t) * nvox + vox]);
                    EXPECT_EQ(p.lr(3u, r, c, t), ch.magnitude_norm[(tc.frame + t) * nvox + vox]);
                    EXPECT_EQ(p.lr(4u, r, c, t), ch.speed[(tc.frame + t) * nvox + vox]);
                    EXPECT_EQ(p.lr(5u, r, c, t), ch.pcmra[vox]);
                }
                for (std::size_t t = 0; t < kPatchFramesHr; t += 9)
                    for (std::size_t k = 0; k < 3; ++k)
                        EXPECT_EQ(p.hr(k, r, c, t),
                                  hr.v[(comp_of[k] * gh.nt + 2 * tc.frame + t) * nvox + vox]);
            }
    }
    EXPECT_THROW(cut_patch(lr, ch, hr, Orientation::XY, 3, 5, 5, 0), std::invalid_argument);  // 3+16>18
    EXPECT_THROW(cut_patch(lr, ch, hr, Orientation::XY, 0, 0, 16, 0), std::invalid_argument);
    EXPECT_THROW(cut_patch(lr, ch, hr, Orientation::XY, 0, 0, 0, 1), std::invalid_argument);
}

TEST(FluidFraction, CountsTheWindow) {
    Grid4D g{16, 16, 16, 16, 2.0, 40.0};
    NdArray<std::uint8_t> all({16, 16, 16});
    all.fill(1);
    for (int o = 0; o < 3; ++o)
        EXPECT_EQ(patch_fluid_fraction(all, g, static_cast<Orientation>(o), 0, 0, 4), 1.0);

    // fluid only in the x < 8 half: an XY window spanning all rows sees 1/2
    NdArray<std::uint8_t> half({16, 16, 16});
    half.fill(0);
    for (std::size_t x = 0; x < 8; ++x)
        for (std::size_t y = 0; y < 16; ++y)
            for (std::size_t z = 0; z < 16; ++z) half(x, y, z) = 1;
    EXPECT_EQ(patch_fluid_fraction(half, g, Orientation::XY, 0, 0, 3), 0.5);
    EXPECT_EQ(patch_fluid_fraction(half, g, Orientation::YZ, 0, 0, 2), 1.0);   // slice x=2 is fluid
    EXPECT_EQ(patch_fluid_fraction(half, g, Orientation::YZ, 0, 0, 12), 0.0);  // slice x=12 is not
}

TEST(Augment, FourQuarterTurnsAreIdentity) {
    const PatchPair p = random_patch(11);
    AugmentSpec rot;
    rot.rotation = 1;
    PatchPair q = p;
    for (int i = 0; i < 4; ++i) q = augment(q, rot);
    EXPECT_TRUE(same_floats(q.lr, p.lr));
    EXPECT_TRUE(same_floats(q.hr, p.hr));
    EXPECT_TRUE(same_mask(q.mask, p.mask));
}

TEST(Augment, InvolutionsAreTheirOwnInverse) {
    const PatchPair p = random_patch(12);
    for (int which = 0; which < 4; ++which) {
        AugmentSpec a;
        a.flip_h = which == 0;
        a.flip_v = which == 1;
        a.negate_velocity = which == 2;
        a.swap_components = which == 3;
        const PatchPair q = augment(augment(p, a), a);
        EXPECT_TRUE(same_floats(q.lr, p.lr));
        EXPECT_TRUE(same_floats(q.hr, p.hr));
        EXPECT_TRUE(same_mask(q.mask, p.mask));
    }
}

TEST(Augment, QuarterTurnRotatesVelocityVectors) {
    // a CCW quarter turn maps in-plane velocity (u, 0) to (0, u)
    const PatchPair p = constant_direction_patch(0.75f, 0.0f, 0.25f);
    AugmentSpec a;
    a.rotation = 1;
    const PatchPair q = augment(p, a);
    const std::size_t plane = kPatchSize * kPatchSize * kPatchFramesLr;
    for (std::size_t i = 0; i < plane; i += 37) {
        EXPECT_EQ(q.lr[0 * plane + i], 0.0f);
        EXPECT_EQ(q.lr[1 * plane + i], 0.75f);
        EXPECT_EQ(q.lr[2 * plane + i], 0.25f);   // out-of-plane unchanged
        EXPECT_EQ(q.lr[3 * plane + i], 0.5f);    // scalar channels untouched
    }
    const std::size_t plane_hr = kPatchSize * kPatchSize * kPatchFramesHr;
    for (std::size_t i = 0; i < plane_hr; i += 41) {
        EXPECT_EQ(q.hr[0 * plane_hr + i], 0.0f);
        EXPECT_EQ(q.hr[1 * plane_hr + i], 0.75f);
    }
}

TEST(Augment, SpatialMapMatchesClosedFormOnScalarChannel) {
    PatchPair p = random_patch(13);
    AugmentSpec a;
    a.rotation = 1;
    const PatchPair q = augment(p, a);
    // CCW quarter turn: destination (r, c) reads source (c, n-1-r)
    for (std::size_t r = 0; r < kPatchSize; ++r)
        for (std::size_t c = 0; c < kPatchSize; ++c) {
            EXPECT_EQ(q.lr(3u, r, c, 5u), p.lr(3u, c, kPatchSize - 1 - r, 5u));
            EXPECT_EQ(q.mask(r, c), p.mask(c, kPatchSize - 1 - r));
        }
}

TEST(Augment, EveryAugmentationIsUndoneByItsInverse) {
    const PatchPair p = random_patch(14);
    for (int rot = 0; rot < 4; ++rot)
        for (int bits = 0; bits < 16; ++bits) {
            AugmentSpec a;
            a.rotation = rot;
            a.flip_h = bits & 1;
            a.flip_v = bits & 2;
            a.negate_velocity = bits & 4;
            a.swap_components = bits & 8;
            const PatchPair q = augment(augment(p, a), inverse_augment(a));
            ASSERT_TRUE(same_floats(q.lr, p.lr)) << "rot=" << rot << " bits=" << bits;
            ASSERT_TRUE(same_floats(q.hr, p.hr)) << "rot=" << rot << " bits=" << bits;
            ASSERT_TRUE(same_mask(q.mask, p.mask)) << "rot=" << rot << " bits=" << bits;
        }
}

TEST(Extract, AllFluidMaskYieldsFullFractions) {
    Grid4D g{16, 16, 16, 16, 2.0, 40.0};
    VelocityField4D lr = indexed_field(g);
    lr.fluid_mask.fill(1);
    Grid4D gh = g;
    gh.nt = 32;
    gh.dt = 20.0;
    VelocityField4D hr = VelocityField4D::zeros(gh);

    ExtractConfig cfg;
    cfg.n_patches = 12;
    cfg.patches_per_iteration = 4;
    const auto patches = extract_patch_pairs(lr, hr, cfg, 5);
    ASSERT_EQ(patches.size(), 12u);
    for (const auto& p : patches) EXPECT_EQ(p.fluid_fraction, 1.0);
}

TEST(Extract, EmptyMaskIsRejected) {
    Grid4D g{16, 16, 16, 16, 2.0, 40.0};
    VelocityField4D lr = VelocityField4D::zeros(g);
    Grid4D gh = g;
    gh.nt = 32;
    gh.dt = 20.0;
    VelocityField4D hr = VelocityField4D::zeros(gh);
    ExtractConfig cfg;
    cfg.n_patches = 4;
    EXPECT_THROW(extract_patch_pairs(lr, hr, cfg, 5), std::invalid_argument);
}

TEST(Extract, OneLowFluidPatchPerIteration) {
    Grid4D g{24, 24, 16, 16, 2.0, 40.0};
    VelocityField4D lr = VelocityField4D::zeros(g);
    // fluid ball of radius 6 voxels at the grid center leaves plenty of
    // low-fluid windows while central windows exceed the 0.2 threshold
    for (std::size_t x = 0; x < 24; ++x)
        for (std::size_t y = 0; y < 24; ++y)
            for (std::size_t z = 0; z < 16; ++z) {
                const double dx = static_cast<double>(x) - 11.5, dy = static_cast<double>(y) - 11.5,
                             dz = static_cast<double>(z) - 7.5;
                if (dx * dx + dy * dy + dz * dz < 36.0) lr.fluid_mask(x, y, z) = 1;
            }
    Grid4D gh = g;
    gh.nt = 32;
    gh.dt = 20.0;
    VelocityField4D hr = VelocityField4D::zeros(gh);

    ExtractConfig cfg;
    cfg.n_patches = 8;
    cfg.patches_per_iteration = 4;
    const auto patches = extract_patch_pairs(lr, hr, cfg, 19);
    ASSERT_EQ(patches.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
        if (i == 3 || i == 7)
            EXPECT_LT(patches[i].fluid_fraction, kFluidFractionMin) << i;
        else
            EXPECT_GE(patches[i].fluid_fraction, kFluidFractionMin) << i;
    }
}

TEST(Extract, DeterministicPerSeed) {
    Grid4D g{16, 16, 16, 16, 2.0, 40.0};
    VelocityField4D lr = indexed_field(g);
    lr.fluid_mask.fill(1);
    Grid4D gh = g;
    gh.nt = 32;
    gh.dt = 20.0;
    VelocityField4D hr = indexed_field(gh);

    ExtractConfig cfg;
    cfg.n_patches = 6;
    cfg.patches_per_iteration = 3;
    const auto a = extract_patch_pairs(lr, hr, cfg, 42);
    const auto b = extract_patch_pairs(lr, hr, cfg, 42);
    const auto c = extract_patch_pairs(lr, hr, cfg, 43);
    ASSERT_EQ(a.size(), b.size());
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_TRUE(same_floats(a[i].lr, b[i].lr));
        EXPECT_TRUE(same_floats(a[i].hr, b[i].hr));
        EXPECT_EQ(a[i].frame_lr, b[i].frame_lr);
        if (a[i].origin0 != c[i].origin0 || a[i].origin1 != c[i].origin1 ||
            a[i].slice != c[i].slice || a[i].frame_lr != c[i].frame_lr ||
            a[i].orientation != c[i].orientation)
            any_difference = true;
    }
    EXPECT_TRUE(any_difference);
}

TEST(Tiling, OffsetsMatchHandValues) {
    EXPECT_EQ(tiling_offsets(48), (std::vector<std::size_t>{0, 12, 24, 32}));
    EXPECT_EQ(tiling_offsets(24), (std::vector<std::size_t>{0, 8}));
    EXPECT_EQ(tiling_offsets(28), (std::vector<std::size_t>{0, 12}));
    EXPECT_EQ(tiling_offsets(16), (std::vector<std::size_t>{0}));
    EXPECT_THROW(tiling_offsets(15), std::invalid_argument);
}

TEST(Tiling, PlanCoversEveryVoxelPerOrientation) {
    Grid4D g{28, 16, 24, 16, 2.0, 40.0};
    const auto plan = plan_inference_tiling(g);
    // xy: {0,12} x {0}; xz: {0,12} x {0,8}; yz: {0} x {0,8}
    EXPECT_EQ(plan.size(), 8u);

    const std::size_t extent[3] = {g.nx, g.ny, g.nz};
    for (int o = 0; o < 3; ++o) {
        const PatchAxes ax = axes_of(static_cast<Orientation>(o));
        NdArray<std::uint8_t> covered({extent[ax.a0], extent[ax.a1]});
        covered.fill(0);
        for (const auto& tile : plan) {
            if (tile.orientation != static_cast<Orientation>(o)) continue;
            for (std::size_t r = 0; r < kPatchSize; ++r)
                for (std::size_t c = 0; c < kPatchSize; ++c)
                    covered(tile.origin0 + r, tile.origin1 + c) = 1;
        }
        for (auto v : covered) EXPECT_EQ(v, 1);
    }

    Grid4D tiny{16, 16, 16, 16, 2.0, 40.0};
    EXPECT_EQ(plan_inference_tiling(tiny).size(), 3u);  // one tile per orientation
}

TEST(Stitch, ConstantPredictionsGiveConstantField) {
    Grid4D hr{16, 16, 16, 32, 2.0, 20.0};
    NdArray<std::uint8_t> mask({16, 16, 16});
    mask.fill(1);
    std::vector<PlacedPrediction> preds;
    for (int o = 0; o < 3; ++o)
        for (std::size_t slice = 0; slice < 16; ++slice) {
            PlacedPrediction p;
            p.hr = NdArray<float>({3, 16, 16, 32});
            const std::size_t plane = 16 * 16 * 32;
            for (std::size_t k = 0; k < 3; ++k)
                std::fill_n(p.hr.data() + k * plane, plane, 0.0f);
            p.hr.fill(0.0f);
            // constant global vector (0.3, -0.2, 0.7): per orientation the
            // patch-local channels are its components along (a0, a1, out)
            const float gvec[3] = {0.3f, -0.2f, 0.7f};
            const PatchAxes ax = axes_of(static_cast<Orientation>(o));
            const std::size_t comp_of[3] = {ax.a0, ax.a1, ax.out};
            for (std::size_t k = 0; k < 3; ++k)
                std::fill_n(p.hr.data() + k * plane, plane, gvec[comp_of[k]]);
            p.orientation = static_cast<Orientation>(o);
            p.slice = slice;
            preds.push_back(std::move(p));
        }
    VelocityField4D out = stitch(preds, hr, mask);
    const std::size_t nvox = hr.voxels();
    const float gvec[3] = {0.3f, -0.2f, 0.7f};
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < 32 * nvox; i += 11)
            EXPECT_NEAR(out.v[c * 32 * nvox + i], gvec[c], 1e-6f);
}

TEST(Stitch, GroundTruthCropsReassembleTheField) {
    Grid4D hr{20, 18, 16, 32, 2.0, 20.0};
    VelocityField4D truth = indexed_field(hr);
    for (auto& v : truth.v) v = std::sin(v * 0.37f);  // break integer structure
    NdArray<std::uint8_t> mask({20, 18, 16});
    mask.fill(1);
    const std::size_t nvox = hr.voxels();
    const std::size_t extent[3] = {hr.nx, hr.ny, hr.nz};

    std::vector<PlacedPrediction> preds;
    for (const auto& tile : plan_inference_tiling(hr)) {
        const PatchAxes ax = axes_of(tile.orientation);
        const std::size_t comp_of[3] = {ax.a0, ax.a1, ax.out};
        for (std::size_t slice = 0; slice < extent[ax.out]; ++slice) {
            PlacedPrediction p;
            p.hr = NdArray<float>({3, 16, 16, 32});
            for (std::size_t r = 0; r < kPatchSize; ++r)
                for (std::size_t c = 0; c < kPatchSize; ++c) {
                    std::size_t idx[3];
                    idx[ax.a0] = tile.origin0 + r;
                    idx[ax.a1] = tile.origin1 + c;
                    idx[ax.out] = slice;
                    const std::size_t vox = (idx[0] * hr.ny + idx[1]) * hr.nz + idx[2];
                    for (std::size_t t = 0; t < kPatchFramesHr; ++t)
                        for (std::size_t k = 0; k < 3; ++k)
                            p.hr(k, r, c, t) = truth.v[(comp_of[k] * hr.nt + t) * nvox + vox];
                }
            p.orientation = tile.orientation;
            p.origin0 = tile.origin0;
            p.origin1 = tile.origin1;
            p.slice = slice;
            preds.push_back(std::move(p));
        }
    }
    VelocityField4D out = stitch(preds, hr, mask);
    double worst = 0.0;
    for (std::size_t i = 0; i < truth.v.size(); ++i)
        worst = std::max(worst, static_cast<double>(std::abs(out.v[i] - truth.v[i])));
    EXPECT_LT(worst, 1e-6);
}

TEST(Stitch, OverlapAveragesTwoTiles) {
    Grid4D hr{28, 16, 16, 32, 2.0, 20.0};
    NdArray<std::uint8_t> mask({28, 16, 16});
    mask.fill(0);
    std::vector<PlacedPrediction> preds;
    for (std::size_t slice = 0; slice < 16; ++slice)
        for (std::size_t which = 0; which < 2; ++which) {
            PlacedPrediction p;
            p.hr = NdArray<float>({3, 16, 16, 32});
            p.hr.fill(which == 0 ? 1.0f : 3.0f);
            p.orientation = Orientation::XY;
            p.origin0 = which == 0 ? 0 : 12;
            p.slice = slice;
            preds.push_back(std::move(p));
        }
    VelocityField4D out = stitch(preds, hr, mask);
    const std::size_t nvox = hr.voxels();
    auto at = [&](std::size_t x) { return out.v[0 * 32 * nvox + ((x * 16 + 4) * 16 + 2)]; };
    EXPECT_EQ(at(5), 1.0f);    // covered by the first tile only
    EXPECT_EQ(at(13), 2.0f);   // overlap rows 12..15: mean of 1 and 3
    EXPECT_EQ(at(20), 3.0f);   // second tile only

    preds.resize(1);  // a single 16-wide tile leaves x >= 16 uncovered
    EXPECT_THROW(stitch(preds, hr, mask), std::invalid_argument);
}

TEST(Dataset, ContainerRoundTripIsExact) {
    std::vector<PatchPair> patches;
    patches.push_back(random_patch(21));
    AugmentSpec a;
    a.rotation = 3;
    a.flip_v = true;
    a.negate_velocity = true;
    patches.push_back(augment(random_patch(22), a));
    patches[1].orientation = Orientation::XZ;
    patches[1].origin0 = 4;
    patches[1].origin1 = 2;
    patches[1].slice = 9;
    patches[1].frame_lr = 0;

    const f4d::Container c = patches_to_container(patches);
    const auto dir = std::filesystem::temp_directory_path() / "tempoflow-patchds";
    std::filesystem::remove_all(dir);
    f4d::save(c, dir.string());
    const f4d::Container loaded = f4d::load(dir.string());
    const auto back = patches_from_container(loaded);

    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_TRUE(same_floats(back[i].lr, patches[i].lr));
        EXPECT_TRUE(same_floats(back[i].hr, patches[i].hr));
        EXPECT_TRUE(same_mask(back[i].mask, patches[i].mask));
        EXPECT_EQ(back[i].orientation, patches[i].orientation);
        EXPECT_EQ(back[i].origin0, patches[i].origin0);
        EXPECT_EQ(back[i].origin1, patches[i].origin1);
        EXPECT_EQ(back[i].slice, patches[i].slice);
        EXPECT_EQ(back[i].frame_lr, patches[i].frame_lr);
        EXPECT_EQ(back[i].augment.rotation, patches[i].augment.rotation);
        EXPECT_EQ(back[i].augment.flip_h, patches[i].augment.flip_h);
        EXPECT_EQ(back[i].augment.flip_v, patches[i].augment.flip_v);
        EXPECT_EQ(back[i].augment.negate_velocity, patches[i].augment.negate_velocity);
        EXPECT_EQ(back[i].augment.swap_components, patches[i].augment.swap_components);
        EXPECT_DOUBLE_EQ(back[i].fluid_fraction, patches[i].fluid_fraction);
    }
    std::filesystem::remove_all(dir);
}

TEST(Dataset, AugmentDatasetKeepsBaseAndAddsTransforms) {
    std::vector<PatchPair> base = {random_patch(31), random_patch(32)};
    const auto out = augment_dataset(base, 2, 7);
    ASSERT_EQ(out.size(), 6u);
    EXPECT_TRUE(same_floats(out[0].lr, base[0].lr));
    EXPECT_TRUE(same_floats(out[3].lr, base[1].lr));
    for (std::size_t i : {1u, 2u, 4u, 5u}) EXPECT_FALSE(out[i].augment.is_identity());
    // deterministic in the seed
    const auto again = augment_dataset(base, 2, 7);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_TRUE(same_floats(out[i].lr, again[i].lr));
}

#pragma once

#include <string>
#include <vector>

#include "tempoflow/core/container.hpp"
#include "tempoflow/patch/patch.hpp"

namespace tempoflow {

/// Patch datasets travel as F4D containers with arrays
///   lr   [N][6][16][16][16] f32
///   hr   [N][3][16][16][32] f32
///   mask [N][16][16]        u8
///   meta [N][11]            f64 (placement, augmentation, fluid fraction)
inline f4d::Container patches_to_container(const std::vector<PatchPair>& patches) {
    require(!patches.empty(), "patches_to_container: empty dataset");
    const std::size_t n = patches.size();

    NdArray<float> lr({n, kChannelsIn, kPatchSize, kPatchSize, kPatchFramesLr});
    NdArray<float> hr({n, 3, kPatchSize, kPatchSize, kPatchFramesHr});
    NdArray<std::uint8_t> mask({n, kPatchSize, kPatchSize});
    NdArray<double> meta({n, 11});
    for (std::size_t i = 0; i < n; ++i) {
        const PatchPair& p = patches[i];
        require(p.lr.size() == lr.size() / n && p.hr.size() == hr.size() / n,
                "patches_to_container: inconsistent patch shape");
        std::copy_n(p.lr.data(), p.lr.size(), lr.data() + i * p.lr.size());
        std::copy_n(p.hr.data(), p.hr.size(), hr.data() + i * p.hr.size());
        std::copy_n(p.mask.data(), p.mask.size(), mask.data() + i * p.mask.size());
        double* m = meta.data() + i * 11;
        m[0] = static_cast<double>(p.orientation);
        m[1] = static_cast<double>(p.origin0);
        m[2] = static_cast<double>(p.origin1);
        m[3] = static_cast<double>(p.slice);
        m[4] = static_cast<double>(p.frame_lr);
        m[5] = p.augment.rotation;
        m[6] = p.augment.flip_h ? 1.0 : 0.0;
        m[7] = p.augment.flip_v ? 1.0 : 0.0;
        m[8] = p.augment.negate_velocity ? 1.0 : 0.0;
        m[9] = p.augment.swap_components ? 1.0 : 0.0;
        m[10] = p.fluid_fraction;
    }

    f4d::Container c;
    c.add("lr", std::move(lr));
    c.add("hr", std::move(hr));
    c.add("mask", std::move(mask));
    c.add("meta", std::move(meta));
    c.meta["kind"] = "patch-dataset";
    c.meta["n_patches"] = n;
    return c;
}

inline std::vector<PatchPair> patches_from_container(const f4d::Container& c) {
    const auto& lr = c.get<float>("lr");
    const auto& hr = c.get<float>("hr");
    const auto& mask = c.get<std::uint8_t>("mask");
    const auto& meta = c.get<double>("meta");
    require(lr.ndim() == 5 && hr.ndim() == 5 && mask.ndim() == 3 && meta.ndim() == 2 &&
                meta.dim(1) == 11,
            "patches_from_container: malformed patch dataset");
    const std::size_t n = lr.dim(0);
    require(hr.dim(0) == n && mask.dim(0) == n && meta.dim(0) == n,
            "patches_from_container: array lengths disagree");

    std::vector<PatchPair> patches(n);
    for (std::size_t i = 0; i < n; ++i) {
        PatchPair& p = patches[i];
        p.lr = NdArray<float>({kChannelsIn, kPatchSize, kPatchSize, kPatchFramesLr});
        p.hr = NdArray<float>({3, kPatchSize, kPatchSize, kPatchFramesHr});
        p.mask = NdArray<std::uint8_t>({kPatchSize, kPatchSize});
        std::copy_n(lr.data() + i * p.lr.size(), p.lr.size(), p.lr.data());
        std::copy_n(hr.data() + i * p.hr.size(), p.hr.size(), p.hr.data());
        std::copy_n(mask.data() + i * p.mask.size(), p.mask.size(), p.mask.data());
        const double* m = meta.data() + i * 11;
        p.orientation = static_cast<Orientation>(static_cast<int>(m[0]));
        p.origin0 = static_cast<std::size_t>(m[1]);
        p.origin1 = static_cast<std::size_t>(m[2]);
        p.slice = static_cast<std::size_t>(m[3]);
        p.frame_lr = static_cast<std::size_t>(m[4]);
        p.augment.rotation = static_cast<int>(m[5]);
        p.augment.flip_h = m[6] != 0.0;
        p.augment.flip_v = m[7] != 0.0;
        p.augment.negate_velocity = m[8] != 0.0;
        p.augment.swap_components = m[9] != 0.0;
        p.fluid_fraction = m[10];
    }
    return patches;
}

/// Draw a non-identity augmentation (rotation always in {90, 180, 270}).
inline AugmentSpec random_augment(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> rot(1, 3);
    std::bernoulli_distribution coin(0.5);
    AugmentSpec a;
    a.rotation = rot(rng);
    a.flip_h = coin(rng);
    a.flip_v = coin(rng);
    a.negate_velocity = coin(rng);
    a.swap_components = coin(rng);
    return a;
}

/// Base patches plus `per_patch` random augmentations of each.
inline std::vector<PatchPair> augment_dataset(const std::vector<PatchPair>& base,
                                              std::size_t per_patch, std::uint64_t seed) {
    std::vector<PatchPair> out;
    out.reserve(base.size() * (1 + per_patch));
    auto rng = substream(seed, "patch-augment");
    for (const auto& p : base) {
        out.push_back(p);
        for (std::size_t k = 0; k < per_patch; ++k) out.push_back(augment(p, random_augment(rng)));
    }
    return out;
}

} // namespace tempoflow

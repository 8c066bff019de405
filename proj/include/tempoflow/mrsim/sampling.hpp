#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tempoflow/core/ndarray.hpp"

namespace tempoflow {

/// One sampled phase-encode cell, in FFT index order (DC at [0][0]).
struct SamplePoint {
    std::size_t frame = 0;
    std::size_t iy = 0;
    std::size_t iz = 0;
};

/// Per-frame sampling masks over the (ky, kz) phase-encode plane; the readout
/// direction (x) is always fully sampled.
struct SamplingPattern {
    NdArray<std::uint8_t> masks;      // [n_frames][ny][nz], FFT index order
    std::vector<SamplePoint> points;  // generation order

    std::size_t n_frames() const { return masks.dim(0); }
    std::size_t ny() const { return masks.dim(1); }
    std::size_t nz() const { return masks.dim(2); }

    /// Fraction of plane cells sampled by the union of all frame masks.
    double union_density() const {
        const std::size_t plane = ny() * nz();
        std::vector<std::uint8_t> any(plane, 0);
        for (std::size_t f = 0; f < n_frames(); ++f)
            for (std::size_t p = 0; p < plane; ++p)
                any[p] |= masks[f * plane + p];
        std::size_t count = 0;
        for (auto a : any) count += a;
        return static_cast<double>(count) / static_cast<double>(plane);
    }
};

namespace detail {

inline std::size_t to_fft_index(long offset, std::size_t n) {
    const long lo = -static_cast<long>(n / 2);
    const long hi = static_cast<long>(n) - 1 + lo;
    offset = std::clamp(offset, lo, hi);
    return static_cast<std::size_t>((offset + static_cast<long>(n)) % static_cast<long>(n));
}

} // namespace detail

/// Variable-density Cartesian phyllotaxis pattern. Point n sits at polar
/// angle n * 137.50776 deg and radius r_max * (n/N)^0.7 on an ellipse
/// inscribed in the plane, snapped to the nearest cell; points are dealt to
/// frames round-robin. Each frame receives ceil(ny*nz / (R * n_frames))
/// points plus the forced k-space center. R = 1 disables acceleration
/// entirely (all cells, every frame).
inline SamplingPattern generate_phyllotaxis_pattern(std::size_t ny, std::size_t nz,
                                                    std::size_t n_frames, double R) {
    require(ny >= 2 && nz >= 2, "generate_phyllotaxis_pattern: plane too small");
    require(n_frames >= 1, "generate_phyllotaxis_pattern: need at least one frame");
    require(R >= 1.0, "generate_phyllotaxis_pattern: acceleration must be >= 1");

    SamplingPattern pat;
    pat.masks = NdArray<std::uint8_t>({n_frames, ny, nz});
    pat.masks.fill(0);

    if (R == 1.0) {
        pat.masks.fill(1);
        pat.points.reserve(n_frames * ny * nz);
        for (std::size_t f = 0; f < n_frames; ++f)
            for (std::size_t iy = 0; iy < ny; ++iy)
                for (std::size_t iz = 0; iz < nz; ++iz) pat.points.push_back({f, iy, iz});
        return pat;
    }

    constexpr double kGoldenAngle = 137.50776 * M_PI / 180.0;
    constexpr double kDensityExponent = 0.7;
    const double plane = static_cast<double>(ny) * static_cast<double>(nz);
    const std::size_t per_frame =
        static_cast<std::size_t>(std::ceil(plane / (R * static_cast<double>(n_frames))));
    require(per_frame >= 1, "generate_phyllotaxis_pattern: R leaves a frame with no points");
    const std::size_t n_total = per_frame * n_frames;

    const double semi_y = static_cast<double>(ny) / 2.0;
    const double semi_z = static_cast<double>(nz) / 2.0;
    for (std::size_t n = 0; n < n_total; ++n) {
        const double frac = static_cast<double>(n) / static_cast<double>(n_total);
        const double r = std::pow(frac, kDensityExponent);
        const double theta = static_cast<double>(n) * kGoldenAngle;
        const long oy = std::lround(r * semi_y * std::cos(theta));
        const long oz = std::lround(r * semi_z * std::sin(theta));
        const std::size_t f = n % n_frames;
        const std::size_t iy = detail::to_fft_index(oy, ny);
        const std::size_t iz = detail::to_fft_index(oz, nz);
        pat.masks(f, iy, iz) = 1;
        pat.points.push_back({f, iy, iz});
    }
    for (std::size_t f = 0; f < n_frames; ++f) {
        if (!pat.masks(f, 0, 0)) {
            pat.masks(f, 0, 0) = 1;
            pat.points.push_back({f, 0, 0});
        }
    }
    return pat;
}

/// Merge groups of `factor` consecutive frame masks into one LR frame by
/// union, modelling readout accumulation over a longer temporal window.
inline SamplingPattern accumulate_frames(const SamplingPattern& pat, std::size_t factor = 2) {
    require(factor >= 1, "accumulate_frames: factor must be >= 1");
    require(pat.n_frames() % factor == 0, "accumulate_frames: frame count not divisible by factor");
    if (factor == 1) return pat;

    const std::size_t nt_lr = pat.n_frames() / factor;
    const std::size_t plane = pat.ny() * pat.nz();
    SamplingPattern out;
    out.masks = NdArray<std::uint8_t>({nt_lr, pat.ny(), pat.nz()});
    out.masks.fill(0);
    for (std::size_t j = 0; j < nt_lr; ++j)
        for (std::size_t k = 0; k < factor; ++k)
            for (std::size_t p = 0; p < plane; ++p)
                out.masks[j * plane + p] |= pat.masks[(j * factor + k) * plane + p];
    out.points.reserve(pat.points.size());
    for (auto pt : pat.points) out.points.push_back({pt.frame / factor, pt.iy, pt.iz});
    return out;
}

} // namespace tempoflow

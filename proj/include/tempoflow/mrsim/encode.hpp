#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "tempoflow/core/fft.hpp"
#include "tempoflow/core/grid.hpp"
#include "tempoflow/core/parallel.hpp"
#include "tempoflow/core/rng.hpp"
#include "tempoflow/mrsim/coils.hpp"
#include "tempoflow/mrsim/sampling.hpp"

namespace tempoflow {

struct AcquisitionConfig {
    double venc = 1.5;  // m/s
    double snr_db_low = 14.0;
    double snr_db_high = 17.0;
    std::size_t n_coils_total = 64;
    std::size_t n_coils_active = 8;
    double acceleration = 7.7;
    std::uint64_t seed = 0;

    void validate() const {
        require(venc > 0.0, "AcquisitionConfig: venc must be positive");
        require(snr_db_low <= snr_db_high, "AcquisitionConfig: SNR range is inverted");
        require(n_coils_active >= 1 && n_coils_active <= n_coils_total,
                "AcquisitionConfig: active coils must be in [1, total]");
        require(acceleration >= 1.0, "AcquisitionConfig: acceleration must be >= 1");
    }
};

/// Multi-coil k-space of a 4-point velocity-encoded acquisition.
/// Encoding 0 is the flow-compensated reference; 1..3 encode v_x, v_y, v_z.
struct MultiCoilKSpace {
    NdArray<std::complex<float>> data;  // [4][nt][n_coils][nx][ny][nz]
    SamplingPattern pattern;            // per-frame masks over (ky, kz)
    AcquisitionConfig config;
    double mean_fluid_signal = 0.0;     // S-bar used for SNR targeting

    std::size_t n_encodings() const { return data.dim(0); }
    std::size_t nt() const { return data.dim(1); }
    std::size_t n_coils() const { return data.dim(2); }
    std::size_t nx() const { return data.dim(3); }
    std::size_t ny() const { return data.dim(4); }
    std::size_t nz() const { return data.dim(5); }
};

constexpr std::size_t kNumEncodings = 4;

/// v_p = (v / venc) * pi;  v_c = m * exp(i * v_p)
inline std::complex<float> complex_signal(double v, double m, double venc) {
    require(venc > 0.0, "complex_signal: venc must be positive");
    const double phase = v / venc * M_PI;
    return {static_cast<float>(m * std::cos(phase)), static_cast<float>(m * std::sin(phase))};
}

/// Complex image of one frame for one encoding (0 = reference with zero
/// phase, 1..3 = velocity component e-1).
inline ComplexVolume velocity_to_complex(const VelocityField4D& field, std::size_t frame,
                                         std::size_t encoding, double venc) {
    require(venc > 0.0, "velocity_to_complex: venc must be positive");
    require(encoding < kNumEncodings, "velocity_to_complex: encoding out of range");
    require(frame < field.grid.nt, "velocity_to_complex: frame out of range");
    const Grid4D& g = field.grid;

    ComplexVolume img({g.nx, g.ny, g.nz});
    const std::size_t nvox = g.voxels();
    const float* m = field.magnitude.data() + frame * nvox;
    if (encoding == 0) {
        for (std::size_t p = 0; p < nvox; ++p) img[p] = {m[p], 0.0f};
    } else {
        const float* v = field.v.data() + ((encoding - 1) * g.nt + frame) * nvox;
        for (std::size_t p = 0; p < nvox; ++p)
            img[p] = complex_signal(v[p], m[p], venc);
    }
    return img;
}

namespace detail {

/// Mean |coil| * m over fluid voxels and frames, averaged across coils.
/// Because the FFT is unitary this equals the mean noise-free image-domain
/// signal magnitude, usable directly for k-space SNR targeting.
inline double mean_fluid_signal(const VelocityField4D& field, const CoilArray& coils) {
    const std::size_t nvox = field.grid.voxels();
    std::size_t n_fluid = 0;
    for (std::size_t p = 0; p < nvox; ++p) n_fluid += field.fluid_mask[p];
    require(n_fluid > 0, "mean_fluid_signal: fluid mask is empty");

    double acc = 0.0;
    for (std::size_t c = 0; c < coils.n_coils(); ++c)
        for (std::size_t t = 0; t < field.grid.nt; ++t)
            for (std::size_t p = 0; p < nvox; ++p)
                if (field.fluid_mask[p])
                    acc += std::abs(coils.maps[c * nvox + p]) * field.magnitude[t * nvox + p];
    return acc / (static_cast<double>(coils.n_coils()) * field.grid.nt * n_fluid);
}

} // namespace detail

/// Fully sampled, noise-free multi-coil k-space of all four encodings:
/// for each frame, encoding and coil, fft3_unitary(coil_map * v_c).
inline MultiCoilKSpace encode_to_kspace(const VelocityField4D& field, const CoilArray& coils,
                                        const AcquisitionConfig& config) {
    config.validate();
    field.validate();
    const Grid4D& g = field.grid;
    require(coils.maps.dim(1) == g.nx && coils.maps.dim(2) == g.ny && coils.maps.dim(3) == g.nz,
            "encode_to_kspace: coil maps do not match grid");

    MultiCoilKSpace ks;
    ks.config = config;
    ks.data = NdArray<std::complex<float>>({kNumEncodings, g.nt, coils.n_coils(), g.nx, g.ny, g.nz});
    ks.pattern = generate_phyllotaxis_pattern(g.ny, g.nz, g.nt, 1.0);  // fully sampled
    ks.mean_fluid_signal = detail::mean_fluid_signal(field, coils);

    const std::size_t nvox = g.voxels();
    const std::size_t n_jobs = kNumEncodings * g.nt;
    parallel_for(n_jobs, [&](std::size_t job) {
        const std::size_t e = job / g.nt;
        const std::size_t t = job % g.nt;
        const ComplexVolume img = velocity_to_complex(field, t, e, config.venc);
        for (std::size_t c = 0; c < coils.n_coils(); ++c) {
            ComplexVolume weighted({g.nx, g.ny, g.nz});
            for (std::size_t p = 0; p < nvox; ++p) weighted[p] = img[p] * coils.maps[c * nvox + p];
            fft3_unitary_inplace(weighted, FftDirection::Forward);
            std::copy_n(weighted.data(), nvox, ks.data.data() + ((e * g.nt + t) * coils.n_coils() + c) * nvox);
        }
    });
    return ks;
}

/// Add i.i.d. complex Gaussian noise at a target image-domain SNR:
/// sigma = S-bar / 10^(snr_db / 20) per real/imag component, applied to every
/// k-space entry. Streams are keyed by (seed, frame, coil, encoding) so the
/// result is independent of scheduling. An infinite target disables noise.
inline MultiCoilKSpace add_noise(const MultiCoilKSpace& ks, double target_snr_db, std::uint64_t seed) {
    if (std::isinf(target_snr_db) && target_snr_db > 0) return ks;
    require(std::isfinite(target_snr_db), "add_noise: target SNR must be finite or +inf");
    require(ks.mean_fluid_signal > 0.0, "add_noise: k-space carries no signal estimate");

    const double sigma = ks.mean_fluid_signal / std::pow(10.0, target_snr_db / 20.0);
    MultiCoilKSpace out = ks;
    const std::size_t nvox = ks.nx() * ks.ny() * ks.nz();
    const std::size_t n_jobs = ks.n_encodings() * ks.nt() * ks.n_coils();
    parallel_for(n_jobs, [&](std::size_t job) {
        const std::size_t e = job / (ks.nt() * ks.n_coils());
        const std::size_t t = (job / ks.n_coils()) % ks.nt();
        const std::size_t c = job % ks.n_coils();
        auto rng = substream(seed, "kspace-noise", t, c, e);
        std::normal_distribution<double> gauss(0.0, sigma);
        std::complex<float>* slab = out.data.data() + job * nvox;
        for (std::size_t p = 0; p < nvox; ++p) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            slab[p] += std::complex<float>(static_cast<float>(re), static_cast<float>(im));
        }
    });
    return out;
}

/// Zero every k-space entry whose (frame, ky, kz) cell is not in the pattern;
/// the readout direction (x) is fully sampled.
inline MultiCoilKSpace sample_kspace(const MultiCoilKSpace& ks, const SamplingPattern& pattern) {
    require(pattern.n_frames() == ks.nt() && pattern.ny() == ks.ny() && pattern.nz() == ks.nz(),
            "sample_kspace: pattern does not match k-space dimensions");

    MultiCoilKSpace out = ks;
    out.pattern = pattern;
    const std::size_t plane = ks.ny() * ks.nz();
    const std::size_t n_slabs = ks.n_encodings() * ks.nt() * ks.n_coils() * ks.nx();
    parallel_for(n_slabs, [&](std::size_t slab) {
        const std::size_t t = (slab / (ks.n_coils() * ks.nx())) % ks.nt();
        const std::uint8_t* mask = pattern.masks.data() + t * plane;
        std::complex<float>* d = out.data.data() + slab * plane;
        for (std::size_t p = 0; p < plane; ++p)
            if (!mask[p]) d[p] = 0.0f;
    });
    return out;
}

/// Merge groups of `factor` consecutive frames into LR frames: masks are
/// unioned and sampled values averaged where windows overlap, mimicking a
/// scanner accumulating readouts over a longer temporal window.
inline MultiCoilKSpace accumulate_kspace(const MultiCoilKSpace& ks, std::size_t factor = 2) {
    require(factor >= 1, "accumulate_kspace: factor must be >= 1");
    require(ks.nt() % factor == 0, "accumulate_kspace: frame count not divisible by factor");
    if (factor == 1) return ks;

    const std::size_t nt_lr = ks.nt() / factor;
    const std::size_t plane = ks.ny() * ks.nz();

    MultiCoilKSpace out;
    out.config = ks.config;
    out.mean_fluid_signal = ks.mean_fluid_signal;
    out.pattern = accumulate_frames(ks.pattern, factor);
    out.data = NdArray<std::complex<float>>(
        {ks.n_encodings(), nt_lr, ks.n_coils(), ks.nx(), ks.ny(), ks.nz()});

    const std::size_t n_jobs = ks.n_encodings() * nt_lr * ks.n_coils();
    parallel_for(n_jobs, [&](std::size_t job) {
        const std::size_t e = job / (nt_lr * ks.n_coils());
        const std::size_t j = (job / ks.n_coils()) % nt_lr;
        const std::size_t c = job % ks.n_coils();
        for (std::size_t x = 0; x < ks.nx(); ++x) {
            std::complex<float>* dst =
                out.data.data() + ((e * nt_lr + j) * ks.n_coils() + c) * ks.nx() * plane + x * plane;
            for (std::size_t p = 0; p < plane; ++p) {
                std::complex<float> sum = 0.0f;
                int cnt = 0;
                for (std::size_t k = 0; k < factor; ++k) {
                    const std::size_t t = j * factor + k;
                    if (!ks.pattern.masks[t * plane + p]) continue;
                    sum += ks.data[(((e * ks.nt() + t) * ks.n_coils() + c) * ks.nx() + x) * plane + p];
                    ++cnt;
                }
                dst[p] = cnt ? sum * (1.0f / static_cast<float>(cnt)) : std::complex<float>(0.0f);
            }
        }
    });
    return out;
}

/// Draw the per-phantom target SNR uniformly from the configured range.
inline double draw_target_snr(const AcquisitionConfig& config, std::uint64_t phantom_index) {
    auto rng = substream(config.seed, "target-snr", phantom_index);
    std::uniform_real_distribution<double> u(config.snr_db_low, config.snr_db_high);
    return u(rng);
}

} // namespace tempoflow

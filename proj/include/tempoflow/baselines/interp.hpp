#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "tempoflow/core/grid.hpp"
#include "tempoflow/core/parallel.hpp"

namespace tempoflow {

/// Periodic temporal linear upsampling of one voxel's series: even output
/// frames copy the input, odd frames are midpoints, the last midpoint wraps
/// to frame 0 (cardiac cycles are periodic).
template <typename T>
std::vector<T> linear_upsample_series(const std::vector<T>& in, std::size_t factor = 2) {
    require(in.size() >= 2, "linear_upsample_series: need at least two frames");
    require(factor >= 1, "linear_upsample_series: factor must be >= 1");
    const std::size_t n = in.size();
    std::vector<T> out(n * factor);
    for (std::size_t i = 0; i < n; ++i) {
        const T a = in[i];
        const T b = in[(i + 1) % n];
        for (std::size_t k = 0; k < factor; ++k) {
            const double w = static_cast<double>(k) / static_cast<double>(factor);
            out[i * factor + k] = static_cast<T>((1.0 - w) * a + w * b);
        }
    }
    return out;
}

/// Periodic band-limited (sinc) upsampling via DFT zero-padding with the
/// Nyquist bin split evenly; computed in double regardless of T.
template <typename T>
std::vector<T> sinc_upsample_series(const std::vector<T>& in, std::size_t factor = 2) {
    require(in.size() >= 2, "sinc_upsample_series: need at least two frames");
    require(factor >= 1, "sinc_upsample_series: factor must be >= 1");
    const std::size_t n = in.size();
    const std::size_t m = n * factor;
    if (factor == 1) return in;

    std::vector<std::complex<double>> spectrum(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ph = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) / n;
            acc += static_cast<double>(in[t]) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        spectrum[k] = acc;
    }

    std::vector<std::complex<double>> padded(m, 0.0);
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < (n + 1) / 2; ++k) padded[k] = spectrum[k];
    for (std::size_t k = half + 1; k < n; ++k) padded[m - n + k] = spectrum[k];
    if (n % 2 == 0) {
        padded[half] = 0.5 * spectrum[half];
        padded[m - half] = 0.5 * spectrum[half];
    }

    std::vector<T> out(m);
    for (std::size_t t = 0; t < m; ++t) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (padded[k] == 0.0) continue;
            const double ph = 2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) / m;
            acc += padded[k] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out[t] = static_cast<T>(acc.real() / static_cast<double>(n));
    }
    return out;
}

namespace detail {

template <typename SeriesFn>
VelocityField4D upsample_field_time(const VelocityField4D& field, std::size_t factor, SeriesFn&& fn) {
    field.validate();
    require(field.grid.nt >= 2, "temporal interpolation: need at least two frames");
    Grid4D out_grid = field.grid;
    out_grid.nt = field.grid.nt * factor;
    out_grid.dt = field.grid.dt / static_cast<double>(factor);

    VelocityField4D out = VelocityField4D::zeros(out_grid);
    out.fluid_mask = field.fluid_mask;

    const std::size_t nvox = field.grid.voxels();
    const std::size_t nt = field.grid.nt;
    parallel_for(nvox, [&](std::size_t p) {
        std::vector<double> series(nt);
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t t = 0; t < nt; ++t) series[t] = field.v[(c * nt + t) * nvox + p];
            const std::vector<double> up = fn(series, factor);
            for (std::size_t t = 0; t < out_grid.nt; ++t)
                out.v[(c * out_grid.nt + t) * nvox + p] = static_cast<float>(up[t]);
        }
        for (std::size_t t = 0; t < nt; ++t) series[t] = field.magnitude[t * nvox + p];
        const std::vector<double> up = fn(series, factor);
        for (std::size_t t = 0; t < out_grid.nt; ++t)
            out.magnitude[t * nvox + p] = static_cast<float>(std::max(0.0, up[t]));
    });
    return out;
}

} // namespace detail

inline VelocityField4D linear_interp_time(const VelocityField4D& field, std::size_t factor = 2) {
    return detail::upsample_field_time(field, factor, [](const std::vector<double>& s, std::size_t f) {
        return linear_upsample_series(s, f);
    });
}

inline VelocityField4D sinc_interp_time(const VelocityField4D& field, std::size_t factor = 2) {
    return detail::upsample_field_time(field, factor, [](const std::vector<double>& s, std::size_t f) {
        return sinc_upsample_series(s, f);
    });
}

} // namespace tempoflow

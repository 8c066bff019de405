#pragma once

#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "tempoflow/core/grid.hpp"

namespace tempoflow {

enum class FftDirection { Forward, Inverse };

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

// fftw plan creation is not thread-safe; execution of distinct plans is.
inline void fft3_raw(std::complex<float>* data, std::size_t nx, std::size_t ny, std::size_t nz, int sign) {
    fftwf_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftwf_plan_dft_3d(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz),
                                 reinterpret_cast<fftwf_complex*>(data),
                                 reinterpret_cast<fftwf_complex*>(data), sign, FFTW_ESTIMATE);
    }
    fftwf_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftwf_destroy_plan(plan);
    }
}

inline void fft3_raw(std::complex<double>* data, std::size_t nx, std::size_t ny, std::size_t nz, int sign) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_3d(static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz),
                                reinterpret_cast<fftw_complex*>(data),
                                reinterpret_cast<fftw_complex*>(data), sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
}

} // namespace detail

/// In-place unitary 3D FFT (1/sqrt(N) normalization in each direction), so
/// inverse(forward(x)) == x and the transform preserves the l2 norm.
template <typename T>
void fft3_unitary_inplace(ComplexVolumeT<T>& x, FftDirection dir) {
    require(x.ndim() == 3, "fft3_unitary: expected a 3D volume");
    const std::size_t nx = x.dim(0), ny = x.dim(1), nz = x.dim(2);
    detail::fft3_raw(x.data(), nx, ny, nz, dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD);
    const T scale = T(1) / std::sqrt(static_cast<T>(nx * ny * nz));
    for (auto& c : x) c *= scale;
}

template <typename T>
ComplexVolumeT<T> fft3_unitary(const ComplexVolumeT<T>& x, FftDirection dir) {
    ComplexVolumeT<T> out = x;
    fft3_unitary_inplace(out, dir);
    return out;
}

} // namespace tempoflow

#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "tempoflow/core/ndarray.hpp"

namespace tempoflow {

namespace detail {

template <typename E> struct real_of { using type = E; };
template <typename T> struct real_of<std::complex<T>> { using type = T; };

/// One orthonormal Haar butterfly pass along `axis` of the leading
/// [mx][my][mz] block of a volume with full strides [nx][ny][nz].
template <typename E>
void haar_axis(NdArray<E>& vol, int axis, std::size_t mx, std::size_t my, std::size_t mz,
               bool forward) {
    using R = typename real_of<E>::type;
    const R s = static_cast<R>(M_SQRT1_2);
    const std::size_t ny = vol.dim(1), nz = vol.dim(2);
    const std::size_t m = axis == 0 ? mx : axis == 1 ? my : mz;
    const std::size_t half = m / 2;
    const std::size_t stride = axis == 0 ? ny * nz : axis == 1 ? nz : 1;

    std::vector<E> tmp(m);
    const std::size_t lim0 = axis == 0 ? my : mx;
    const std::size_t lim1 = axis == 2 ? my : mz;
    for (std::size_t a = 0; a < lim0; ++a)
        for (std::size_t b = 0; b < lim1; ++b) {
            // base index of this 1D line
            std::size_t base;
            if (axis == 0) base = a * nz + b;
            else if (axis == 1) base = a * ny * nz + b;
            else base = a * ny * nz + b * nz;
            E* line = vol.data() + base;
            if (forward) {
                for (std::size_t i = 0; i < half; ++i) {
                    const E x0 = line[(2 * i) * stride];
                    const E x1 = line[(2 * i + 1) * stride];
                    tmp[i] = (x0 + x1) * s;
                    tmp[half + i] = (x0 - x1) * s;
                }
            } else {
                for (std::size_t i = 0; i < half; ++i) {
                    const E avg = line[i * stride];
                    const E dif = line[(half + i) * stride];
                    tmp[2 * i] = (avg + dif) * s;
                    tmp[2 * i + 1] = (avg - dif) * s;
                }
            }
            for (std::size_t i = 0; i < m; ++i) line[i * stride] = tmp[i];
        }
}

} // namespace detail

/// Orthonormal separable 3D Haar transform, L levels, in place. At each level
/// the butterfly runs along x, y, z on the current approximation block; the
/// next level recurses into the low-pass octant.
template <typename E>
void haar_forward_inplace(NdArray<E>& vol, std::size_t levels) {
    require(vol.ndim() == 3, "haar_forward: expected a 3D volume");
    require(levels >= 1, "haar_forward: need at least one level");
    const std::size_t step = std::size_t{1} << levels;
    require(vol.dim(0) % step == 0 && vol.dim(1) % step == 0 && vol.dim(2) % step == 0,
            "haar_forward: dims must be divisible by 2^levels");
    for (std::size_t l = 0; l < levels; ++l) {
        const std::size_t mx = vol.dim(0) >> l, my = vol.dim(1) >> l, mz = vol.dim(2) >> l;
        for (int axis = 0; axis < 3; ++axis) detail::haar_axis(vol, axis, mx, my, mz, true);
    }
}

template <typename E>
void haar_inverse_inplace(NdArray<E>& vol, std::size_t levels) {
    require(vol.ndim() == 3, "haar_inverse: expected a 3D volume");
    require(levels >= 1, "haar_inverse: need at least one level");
    const std::size_t step = std::size_t{1} << levels;
    require(vol.dim(0) % step == 0 && vol.dim(1) % step == 0 && vol.dim(2) % step == 0,
            "haar_inverse: dims must be divisible by 2^levels");
    for (std::size_t l = levels; l-- > 0;) {
        const std::size_t mx = vol.dim(0) >> l, my = vol.dim(1) >> l, mz = vol.dim(2) >> l;
        for (int axis = 2; axis >= 0; --axis) detail::haar_axis(vol, axis, mx, my, mz, false);
    }
}

template <typename E>
NdArray<E> haar_forward(const NdArray<E>& vol, std::size_t levels) {
    NdArray<E> out = vol;
    haar_forward_inplace(out, levels);
    return out;
}

template <typename E>
NdArray<E> haar_inverse(const NdArray<E>& coeffs, std::size_t levels) {
    NdArray<E> out = coeffs;
    haar_inverse_inplace(out, levels);
    return out;
}

} // namespace tempoflow

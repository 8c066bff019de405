#pragma once

#include <complex>

#include "tempoflow/core/fft.hpp"
#include "tempoflow/core/grid.hpp"
#include "tempoflow/mrsim/coils.hpp"

namespace tempoflow {

/// Per-frame SENSE-style encoding operator E = mask . FFT . coil-multiply
/// and its adjoint. Templated on the scalar so adjoint identities can be
/// verified in double precision.
template <typename T>
struct EncodingOperatorT {
    NdArray<std::complex<T>> maps;  // [n_coils][nx][ny][nz]
    NdArray<std::uint8_t> mask;     // [ny][nz]; empty array = fully sampled

    std::size_t n_coils() const { return maps.dim(0); }
    std::size_t nx() const { return maps.dim(1); }
    std::size_t ny() const { return maps.dim(2); }
    std::size_t nz() const { return maps.dim(3); }

    void validate() const {
        require(maps.ndim() == 4 && maps.dim(0) >= 1, "EncodingOperator: bad coil map shape");
        if (mask.size() > 0)
            require(mask.ndim() == 2 && mask.dim(0) == ny() && mask.dim(1) == nz(),
                    "EncodingOperator: mask does not match the phase-encode plane");
    }

    bool cell_sampled(std::size_t y, std::size_t z) const {
        return mask.size() == 0 || mask[y * nz() + z] != 0;
    }

    /// Largest voxelwise sum of squared coil sensitivities; EᴴE's spectral
    /// norm is bounded by it, giving a safe gradient step 1/L.
    double lipschitz_bound() const {
        const std::size_t nvox = nx() * ny() * nz();
        double worst = 0.0;
        for (std::size_t p = 0; p < nvox; ++p) {
            double ss = 0.0;
            for (std::size_t c = 0; c < n_coils(); ++c) ss += std::norm(maps[c * nvox + p]);
            worst = std::max(worst, ss);
        }
        return worst;
    }

    /// E x: coil-weight, Fourier-transform and mask one image volume.
    NdArray<std::complex<T>> apply(const NdArray<std::complex<T>>& x) const {
        require(x.ndim() == 3 && x.dim(0) == nx() && x.dim(1) == ny() && x.dim(2) == nz(),
                "apply_E: image does not match operator grid");
        const std::size_t nvox = nx() * ny() * nz();
        const std::size_t plane = ny() * nz();
        NdArray<std::complex<T>> y({n_coils(), nx(), ny(), nz()});
        ComplexVolumeT<T> tmp({nx(), ny(), nz()});
        for (std::size_t c = 0; c < n_coils(); ++c) {
            for (std::size_t p = 0; p < nvox; ++p) tmp[p] = maps[c * nvox + p] * x[p];
            fft3_unitary_inplace(tmp, FftDirection::Forward);
            std::complex<T>* out = y.data() + c * nvox;
            if (mask.size() == 0) {
                std::copy_n(tmp.data(), nvox, out);
            } else {
                for (std::size_t ix = 0; ix < nx(); ++ix)
                    for (std::size_t p = 0; p < plane; ++p)
                        out[ix * plane + p] = mask[p] ? tmp[ix * plane + p] : std::complex<T>(0);
            }
        }
        return y;
    }

    /// Eᴴ y: mask, inverse-transform and conjugate-coil-combine multicoil
    /// k-space back to one image volume.
    NdArray<std::complex<T>> apply_adjoint(const NdArray<std::complex<T>>& y) const {
        require(y.ndim() == 4 && y.dim(0) == n_coils() && y.dim(1) == nx() && y.dim(2) == ny() &&
                    y.dim(3) == nz(),
                "apply_E_adjoint: k-space does not match operator");
        const std::size_t nvox = nx() * ny() * nz();
        const std::size_t plane = ny() * nz();
        NdArray<std::complex<T>> x({nx(), ny(), nz()});
        x.fill(std::complex<T>(0));
        ComplexVolumeT<T> tmp({nx(), ny(), nz()});
        for (std::size_t c = 0; c < n_coils(); ++c) {
            const std::complex<T>* in = y.data() + c * nvox;
            if (mask.size() == 0) {
                std::copy_n(in, nvox, tmp.data());
            } else {
                for (std::size_t ix = 0; ix < nx(); ++ix)
                    for (std::size_t p = 0; p < plane; ++p)
                        tmp[ix * plane + p] = mask[p] ? in[ix * plane + p] : std::complex<T>(0);
            }
            fft3_unitary_inplace(tmp, FftDirection::Inverse);
            for (std::size_t p = 0; p < nvox; ++p) x[p] += std::conj(maps[c * nvox + p]) * tmp[p];
        }
        return x;
    }
};

using EncodingOperator = EncodingOperatorT<float>;

/// Build the per-frame operator from simulation coils and one frame's mask.
template <typename T>
EncodingOperatorT<T> make_encoding_operator(const CoilArray& coils, const NdArray<std::uint8_t>& masks,
                                            std::size_t frame) {
    EncodingOperatorT<T> op;
    op.maps = NdArray<std::complex<T>>(coils.maps.shape());
    for (std::size_t i = 0; i < coils.maps.size(); ++i)
        op.maps[i] = std::complex<T>(coils.maps[i].real(), coils.maps[i].imag());
    if (masks.size() > 0) {
        require(masks.ndim() == 3 && frame < masks.dim(0), "make_encoding_operator: bad frame");
        op.mask = NdArray<std::uint8_t>({masks.dim(1), masks.dim(2)});
        std::copy_n(masks.data() + frame * op.mask.size(), op.mask.size(), op.mask.data());
    }
    op.validate();
    return op;
}

} // namespace tempoflow

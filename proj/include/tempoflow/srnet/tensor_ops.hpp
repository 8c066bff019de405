#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "tempoflow/core/ndarray.hpp"

namespace tempoflow {

namespace gemm_detail {

/// C[M x N] = A[M x K] * B[K x N], all row-major. The j-inner axpy form
/// vectorizes without reassociation; N is blocked for cache residency.
template <typename T>
void gemm(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
    std::fill(c, c + m * n, T(0));
    constexpr std::size_t kBlockN = 512;
    for (std::size_t j0 = 0; j0 < n; j0 += kBlockN) {
        const std::size_t jn = std::min(kBlockN, n - j0);
        for (std::size_t i = 0; i < m; ++i) {
            T* crow = c + i * n + j0;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const T av = a[i * k + kk];
                if (av == T(0)) continue;
                const T* brow = b + kk * n + j0;
                for (std::size_t j = 0; j < jn; ++j) crow[j] += av * brow[j];
            }
        }
    }
}

/// Fixed-order laned dot product; the lane loop vectorizes cleanly.
template <typename T>
T dot(const T* x, const T* y, std::size_t n) {
    constexpr std::size_t kLanes = 16;
    T acc[kLanes] = {};
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes)
        for (std::size_t l = 0; l < kLanes; ++l) acc[l] += x[j + l] * y[j + l];
    T s = T(0);
    for (; j < n; ++j) s += x[j] * y[j];
    for (std::size_t l = 0; l < kLanes; ++l) s += acc[l];
    return s;
}

/// C[M x K] = A[M x N] * B[K x N]^T via row dots (the dW reduction).
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t n, std::size_t k) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t kk = 0; kk < k; ++kk) c[i * k + kk] = dot(a + i * n, b + kk * n, n);
}

} // namespace gemm_detail

/// Scratch buffers reused across convolution calls.
template <typename T>
struct ConvScratch {
    std::vector<T> col;    // im2col matrix [K][N]
    std::vector<T> kern;   // repacked kernel matrix

    void reserve_col(std::size_t k, std::size_t n) {
        if (col.size() < k * n) col.resize(k * n);
    }
    void reserve_kern(std::size_t sz) {
        if (kern.size() < sz) kern.resize(sz);
    }
};

namespace conv_detail {

/// Unfold x [C][D0][D1][D2] into columns [C*ks^3][D0*D1*D2] with zero padding
/// (ks is 1 or 3; pad = (ks-1)/2).
template <typename T>
void im2col(const T* x, std::size_t ch, std::size_t d0, std::size_t d1, std::size_t d2,
            std::size_t ks, T* col) {
    const std::size_t n = d0 * d1 * d2;
    const long pad = static_cast<long>((ks - 1) / 2);
    std::size_t row = 0;
    for (std::size_t c = 0; c < ch; ++c)
        for (std::size_t k0 = 0; k0 < ks; ++k0)
            for (std::size_t k1 = 0; k1 < ks; ++k1)
                for (std::size_t k2 = 0; k2 < ks; ++k2, ++row) {
                    T* out = col + row * n;
                    const long o0 = static_cast<long>(k0) - pad;
                    const long o1 = static_cast<long>(k1) - pad;
                    const long o2 = static_cast<long>(k2) - pad;
                    for (std::size_t a = 0; a < d0; ++a) {
                        const long sa = static_cast<long>(a) + o0;
                        if (sa < 0 || sa >= static_cast<long>(d0)) {
                            std::fill(out + a * d1 * d2, out + (a + 1) * d1 * d2, T(0));
                            continue;
                        }
                        for (std::size_t b = 0; b < d1; ++b) {
                            const long sb = static_cast<long>(b) + o1;
                            T* line = out + (a * d1 + b) * d2;
                            if (sb < 0 || sb >= static_cast<long>(d1)) {
                                std::fill(line, line + d2, T(0));
                                continue;
                            }
                            const T* src = x + (c * d0 * d1 + sa * d1 + sb) * d2;
                            const long lo = std::max<long>(0, -o2);
                            const long hi = std::min<long>(d2, static_cast<long>(d2) - o2);
                            for (long t = 0; t < lo; ++t) line[t] = T(0);
                            for (long t = lo; t < hi; ++t) line[t] = src[t + o2];
                            for (long t = hi; t < static_cast<long>(d2); ++t) line[t] = T(0);
                        }
                    }
                }
}

} // namespace conv_detail

/// y[co][n] = sum_k W[co][k] col[k][n] + b[co]; same-size zero-padded conv.
/// x: [C_in][D0][D1][D2], w: [C_out][C_in][ks][ks][ks], y: [C_out][D0][D1][D2]
template <typename T>
void conv3d_forward(const NdArray<T>& x, const NdArray<T>& w, const NdArray<T>& bias, NdArray<T>& y,
                    ConvScratch<T>& scratch) {
    const std::size_t cin = x.dim(0), d0 = x.dim(1), d1 = x.dim(2), d2 = x.dim(3);
    const std::size_t cout = w.dim(0), ks = w.dim(2);
    require(w.dim(1) == cin && (ks == 1 || ks == 3), "conv3d_forward: kernel shape mismatch");
    require(bias.size() == cout, "conv3d_forward: bias shape mismatch");
    const std::size_t n = d0 * d1 * d2;
    const std::size_t k = cin * ks * ks * ks;

    y = NdArray<T>({cout, d0, d1, d2});
    scratch.reserve_col(k, n);
    conv_detail::im2col(x.data(), cin, d0, d1, d2, ks, scratch.col.data());
    gemm_detail::gemm(w.data(), scratch.col.data(), y.data(), cout, k, n);
    for (std::size_t co = 0; co < cout; ++co) {
        T* row = y.data() + co * n;
        const T b = bias[co];
        for (std::size_t j = 0; j < n; ++j) row[j] += b;
    }
}

/// Gradients of the convolution: dW = dY . col(x)^T, db = row sums of dY,
/// dX = full correlation of dY with the flipped kernel (via a repacked
/// [C_in][C_out ks^3] kernel matrix and im2col of dY).
template <typename T>
void conv3d_backward(const NdArray<T>& x, const NdArray<T>& w, const NdArray<T>& dy, NdArray<T>& dw,
                     NdArray<T>& db, NdArray<T>& dx, ConvScratch<T>& scratch) {
    const std::size_t cin = x.dim(0), d0 = x.dim(1), d1 = x.dim(2), d2 = x.dim(3);
    const std::size_t cout = w.dim(0), ks = w.dim(2);
    const std::size_t n = d0 * d1 * d2;
    const std::size_t k = cin * ks * ks * ks;
    const std::size_t kc = ks * ks * ks;
    require(dy.dim(0) == cout && dy.size() == cout * n, "conv3d_backward: dY shape mismatch");

    dw = NdArray<T>(w.shape());
    db = NdArray<T>({cout});
    dx = NdArray<T>(x.shape());

    // dW and db from the forward unfolding of x
    scratch.reserve_col(std::max(k, cout * kc), n);
    conv_detail::im2col(x.data(), cin, d0, d1, d2, ks, scratch.col.data());
    gemm_detail::gemm_nt(dy.data(), scratch.col.data(), dw.data(), cout, n, k);
    for (std::size_t co = 0; co < cout; ++co) {
        T s = T(0);
        const T* row = dy.data() + co * n;
        for (std::size_t j = 0; j < n; ++j) s += row[j];
        db[co] = s;
    }

    // dX: repack kernel as [cin][cout * ks^3] with flipped taps
    scratch.reserve_kern(cin * cout * kc);
    for (std::size_t ci = 0; ci < cin; ++ci)
        for (std::size_t co = 0; co < cout; ++co)
            for (std::size_t t = 0; t < kc; ++t)
                scratch.kern[(ci * cout + co) * kc + (kc - 1 - t)] = w[(co * cin + ci) * kc + t];
    conv_detail::im2col(dy.data(), cout, d0, d1, d2, ks, scratch.col.data());
    gemm_detail::gemm(scratch.kern.data(), scratch.col.data(), dx.data(), cin, cout * kc, n);
}

template <typename T>
void leaky_relu_forward(const NdArray<T>& x, T slope, NdArray<T>& y) {
    y = NdArray<T>(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : slope * x[i];
}

/// dX from dY using the stored pre-activation sign.
template <typename T>
void leaky_relu_backward(const NdArray<T>& x_pre, T slope, const NdArray<T>& dy, NdArray<T>& dx) {
    dx = NdArray<T>(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = x_pre[i] > T(0) ? dy[i] : slope * dy[i];
}

/// Frame-aligned temporal linear upsampling x2 along the last axis:
/// out[2i] = in[i], out[2i+1] = midpoint, and the final half-step is the
/// linear extrapolation 1.5*in[T-1] - 0.5*in[T-2] (exact for ramps).
template <typename T>
void upsample_time_forward(const NdArray<T>& x, NdArray<T>& y) {
    const std::size_t nt = x.dim(x.ndim() - 1);
    require(nt >= 2, "upsample_time: need at least two frames");
    auto shape = x.shape();
    shape.back() = 2 * nt;
    y = NdArray<T>(shape);
    const std::size_t lines = x.size() / nt;
    for (std::size_t l = 0; l < lines; ++l) {
        const T* in = x.data() + l * nt;
        T* out = y.data() + l * 2 * nt;
        for (std::size_t i = 0; i + 1 < nt; ++i) {
            out[2 * i] = in[i];
            out[2 * i + 1] = T(0.5) * (in[i] + in[i + 1]);
        }
        out[2 * nt - 2] = in[nt - 1];
        out[2 * nt - 1] = T(1.5) * in[nt - 1] - T(0.5) * in[nt - 2];
    }
}

template <typename T>
void upsample_time_backward(const NdArray<T>& dy, NdArray<T>& dx) {
    const std::size_t nt2 = dy.dim(dy.ndim() - 1);
    require(nt2 % 2 == 0 && nt2 >= 4, "upsample_time_backward: bad frame count");
    const std::size_t nt = nt2 / 2;
    auto shape = dy.shape();
    shape.back() = nt;
    dx = NdArray<T>(shape);
    const std::size_t lines = dy.size() / nt2;
    for (std::size_t l = 0; l < lines; ++l) {
        const T* dout = dy.data() + l * nt2;
        T* din = dx.data() + l * nt;
        std::fill(din, din + nt, T(0));
        for (std::size_t i = 0; i + 1 < nt; ++i) {
            din[i] += dout[2 * i];
            din[i] += T(0.5) * dout[2 * i + 1];
            din[i + 1] += T(0.5) * dout[2 * i + 1];
        }
        din[nt - 1] += dout[2 * nt - 2];
        din[nt - 1] += T(1.5) * dout[2 * nt - 1];
        din[nt - 2] -= T(0.5) * dout[2 * nt - 1];
    }
}

} // namespace tempoflow

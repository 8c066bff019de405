#pragma once

#include <cmath>

#include "tempoflow/core/ndarray.hpp"
#include "tempoflow/srnet/network.hpp"

namespace tempoflow {

struct LossConfig {
    double alpha = 0.8;     ///< weight of the MSE part vs the projected-L1 part
    double beta = 0.5;      ///< mix of the two projected L1 losses
    double lambda_nn = 5e-7;
    double eps_dir = 1e-8;  ///< guard for cos(theta) at near-zero magnitudes

    void validate() const {
        require(alpha >= 0.0 && alpha <= 1.0, "LossConfig: alpha must be in [0,1]");
        require(beta >= 0.0 && beta <= 1.0, "LossConfig: beta must be in [0,1]");
        require(lambda_nn >= 0.0, "LossConfig: lambda_nn must be non-negative");
        require(eps_dir > 0.0, "LossConfig: eps_dir must be positive");
    }
};

struct LossBreakdown {
    double mse_fluid = 0.0;
    double mse_nonfluid = 0.0;
    double mp = 0.0;          ///< projected L1 term over fluid voxels
    double weight_reg = 0.0;  ///< lambda_nn * ||w||^2
    double total = 0.0;
    bool fluid_empty = false;
};

namespace detail {

template <typename T>
double sgn(T v) {
    return v > T(0) ? 1.0 : v < T(0) ? -1.0 : 0.0;
}

} // namespace detail

/// Loss of one HR prediction [3][H][W][Tout] against the target, with the
/// static in-plane fluid mask [H][W] broadcast over frames:
///   total = alpha (MSE_fluid + MSE_nonfluid) + (1-alpha) L_mp + lambda ||w||^2
/// MSE terms are per-region means of the squared vector error; L_mp combines
/// the two projected L1 losses with beta over fluid voxels, with cos(theta)
/// guarded by max(|v||v_hat|, eps_dir). If `d_pred` is non-null the exact
/// gradient of the data terms w.r.t. the prediction is accumulated there.
template <typename T>
LossBreakdown velocity_loss(const NdArray<T>& pred, const NdArray<T>& target,
                            const NdArray<std::uint8_t>& mask, const LossConfig& cfg,
                            double weight_sq_norm, NdArray<T>* d_pred = nullptr) {
    cfg.validate();
    require(pred.ndim() == 4 && pred.dim(0) == 3, "velocity_loss: prediction must be [3][H][W][T]");
    require(pred.shape() == target.shape(), "velocity_loss: shape mismatch");
    require(mask.ndim() == 2 && mask.dim(0) == pred.dim(1) && mask.dim(1) == pred.dim(2),
            "velocity_loss: mask shape mismatch");

    const std::size_t h = pred.dim(1), w = pred.dim(2), nt = pred.dim(3);
    const std::size_t plane = h * w * nt;

    std::size_t n_fluid_cells = 0;
    for (const auto& m : mask) n_fluid_cells += m ? 1 : 0;
    const std::size_t n_fluid = n_fluid_cells * nt;
    const std::size_t n_nonfluid = (h * w - n_fluid_cells) * nt;

    if (d_pred) {
        require(d_pred->shape() == pred.shape(), "velocity_loss: gradient shape mismatch");
        d_pred->fill(T(0));
    }

    LossBreakdown out;
    out.fluid_empty = n_fluid == 0;
    const double w_mse_fluid = n_fluid ? cfg.alpha / static_cast<double>(n_fluid) : 0.0;
    const double w_mse_nonfluid = n_nonfluid ? cfg.alpha / static_cast<double>(n_nonfluid) : 0.0;
    const double w_mp = n_fluid ? (1.0 - cfg.alpha) / static_cast<double>(n_fluid) : 0.0;

    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const bool fluid = mask(r, c) != 0;
            for (std::size_t t = 0; t < nt; ++t) {
                const std::size_t at = (r * w + c) * nt + t;
                double b[3], a[3], diff[3];
                for (std::size_t k = 0; k < 3; ++k) {
                    b[k] = pred[k * plane + at];
                    a[k] = target[k * plane + at];
                    diff[k] = b[k] - a[k];
                }
                const double se = diff[0] * diff[0] + diff[1] * diff[1] + diff[2] * diff[2];
                if (fluid)
                    out.mse_fluid += se / (n_fluid ? static_cast<double>(n_fluid) : 1.0);
                else
                    out.mse_nonfluid += se / (n_nonfluid ? static_cast<double>(n_nonfluid) : 1.0);
                if (d_pred) {
                    const double wv = fluid ? w_mse_fluid : w_mse_nonfluid;
                    for (std::size_t k = 0; k < 3; ++k)
                        (*d_pred)[k * plane + at] += static_cast<T>(2.0 * wv * diff[k]);
                }

                if (!fluid) continue;
                const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
                const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
                if (na == 0.0 && nb == 0.0) continue;  // undefined direction, contributes 0
                const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                const double guard = std::max(na * nb, cfg.eps_dir);
                const double cos_th = dot / guard;
                const double r1 = na - nb * cos_th;  // L1_I inner
                const double r2 = nb - na * cos_th;  // L1_II inner
                out.mp += (cfg.beta * std::abs(r1) + (1.0 - cfg.beta) * std::abs(r2)) /
                          static_cast<double>(n_fluid);

                if (d_pred) {
                    const double s1 = cfg.beta * detail::sgn(r1);
                    const double s2 = (1.0 - cfg.beta) * detail::sgn(r2);
                    double g[3] = {0.0, 0.0, 0.0};
                    // d nb / db = b/nb (0 at nb = 0), d dot / db = a
                    double bhat[3] = {0.0, 0.0, 0.0};
                    if (nb > 0.0)
                        for (std::size_t k = 0; k < 3; ++k) bhat[k] = b[k] / nb;
                    if (na * nb >= cfg.eps_dir) {
                        // unguarded: L1_I = |na - dot/na|, L1_II = |nb - dot/nb|
                        for (std::size_t k = 0; k < 3; ++k) {
                            g[k] += s1 * (-a[k] / na);
                            g[k] += s2 * (bhat[k] - a[k] / nb + dot * b[k] / (nb * nb * nb));
                        }
                    } else {
                        // guard active: cos = dot/eps
                        for (std::size_t k = 0; k < 3; ++k) {
                            const double d_nbdot = nb > 0.0 ? dot * bhat[k] + nb * a[k] : 0.0;
                            g[k] += s1 * (-d_nbdot / cfg.eps_dir);
                            g[k] += s2 * (bhat[k] - na * a[k] / cfg.eps_dir);
                        }
                    }
                    for (std::size_t k = 0; k < 3; ++k)
                        (*d_pred)[k * plane + at] += static_cast<T>(w_mp * g[k]);
                }
            }
        }

    out.weight_reg = cfg.lambda_nn * weight_sq_norm;
    out.total = cfg.alpha * (out.mse_fluid + out.mse_nonfluid) + (1.0 - cfg.alpha) * out.mp +
                out.weight_reg;
    return out;
}

} // namespace tempoflow

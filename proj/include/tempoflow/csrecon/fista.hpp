#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "tempoflow/core/parallel.hpp"
#include "tempoflow/csrecon/haar.hpp"
#include "tempoflow/csrecon/operator.hpp"
#include "tempoflow/mrsim/encode.hpp"

namespace tempoflow {

struct FistaConfig {
    double lambda_cs = -1.0;   ///< < 0 selects the auto rule 0.005 * max|Eᴴy|
    std::size_t n_iter = 60;
    double step_size = 1.0;    ///< gradient step in units of 1/Lip(EᴴE)
    double tolerance = 0.0;    ///< relative objective change for early stop (0 = run all)
    std::size_t haar_levels = 2;
    bool use_momentum = true;  ///< false degrades FISTA to plain ISTA

    void validate() const {
        require(n_iter >= 1, "FistaConfig: need at least one iteration");
        require(step_size > 0.0, "FistaConfig: step size must be positive");
        require(tolerance >= 0.0, "FistaConfig: tolerance must be non-negative");
        require(haar_levels >= 1, "FistaConfig: need at least one wavelet level");
    }
};

struct ObjectiveSample {
    double data_term = 0.0;  ///< ½‖Ex − y‖²
    double l1_term = 0.0;    ///< λ‖Ψx‖₁
    double total = 0.0;
};

template <typename T>
struct FistaResultT {
    ComplexVolumeT<T> image;
    std::vector<ObjectiveSample> history;  ///< objective at x_0 and after each iteration
    double lambda = 0.0;                   ///< the λ actually used
};

using FistaResult = FistaResultT<float>;

/// Complex soft-thresholding: c * max(1 − t/|c|, 0); the prox of t·‖·‖₁.
template <typename T>
std::complex<T> soft_threshold(std::complex<T> c, double t) {
    const double mag = std::abs(std::complex<double>(c.real(), c.imag()));
    if (mag <= t) return {0, 0};
    const T scale = static_cast<T>(1.0 - t / mag);
    return c * scale;
}

namespace detail {

template <typename T>
double l1_norm(const NdArray<std::complex<T>>& a) {
    double s = 0.0;
    for (const auto& c : a) s += std::abs(std::complex<double>(c.real(), c.imag()));
    return s;
}

template <typename T>
double sq_norm_diff(const NdArray<std::complex<T>>& a, const NdArray<std::complex<T>>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double re = static_cast<double>(a[i].real()) - b[i].real();
        const double im = static_cast<double>(a[i].imag()) - b[i].imag();
        s += re * re + im * im;
    }
    return s;
}

} // namespace detail

/// FISTA on ½‖Ex − y‖² + λ‖Ψx‖₁ for one frame of one encoding.
/// y is the sampled multicoil k-space [n_coils][nx][ny][nz].
template <typename T>
FistaResultT<T> fista_reconstruct(const NdArray<std::complex<T>>& y, const EncodingOperatorT<T>& op,
                                  const FistaConfig& cfg) {
    cfg.validate();
    op.validate();
    require(y.ndim() == 4, "fista_reconstruct: expected multicoil k-space [coils][x][y][z]");

    const std::size_t step = std::size_t{1} << cfg.haar_levels;
    require(op.nx() % step == 0 && op.ny() % step == 0 && op.nz() % step == 0,
            "fista_reconstruct: grid dims must be divisible by 2^haar_levels");

    FistaResultT<T> res;
    const NdArray<std::complex<T>> ehy = op.apply_adjoint(y);
    double lambda = cfg.lambda_cs;
    if (lambda < 0.0) {
        double peak = 0.0;
        for (const auto& c : ehy)
            peak = std::max(peak, std::abs(std::complex<double>(c.real(), c.imag())));
        lambda = 0.005 * peak;
    }
    res.lambda = lambda;

    const double lip = std::max(op.lipschitz_bound(), 1e-30);
    const double tau = cfg.step_size / lip;

    ComplexVolumeT<T> x({op.nx(), op.ny(), op.nz()});
    x.fill(std::complex<T>(0));
    ComplexVolumeT<T> z = x;
    double t_momentum = 1.0;

    auto objective = [&](const ComplexVolumeT<T>& img) {
        ObjectiveSample s;
        s.data_term = 0.5 * detail::sq_norm_diff(op.apply(img), y);
        NdArray<std::complex<T>> coef = haar_forward(img, cfg.haar_levels);
        s.l1_term = lambda * detail::l1_norm(coef);
        s.total = s.data_term + s.l1_term;
        return s;
    };

    res.history.push_back(objective(x));
    const double initial = res.history.front().total;

    for (std::size_t k = 0; k < cfg.n_iter; ++k) {
        // gradient step on the smooth term at the momentum point
        NdArray<std::complex<T>> grad = op.apply_adjoint(op.apply(z));
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad[i] = z[i] - static_cast<T>(tau) * (grad[i] - ehy[i]);
        // prox of λ‖Ψ·‖₁ in the orthonormal wavelet domain
        haar_forward_inplace(grad, cfg.haar_levels);
        const double thresh = lambda * tau;
        for (auto& c : grad) c = soft_threshold(c, thresh);
        haar_inverse_inplace(grad, cfg.haar_levels);

        ComplexVolumeT<T> x_next = std::move(grad);
        if (cfg.use_momentum) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
            const T gamma = static_cast<T>((t_momentum - 1.0) / t_next);
            for (std::size_t i = 0; i < z.size(); ++i)
                z[i] = x_next[i] + gamma * (x_next[i] - x[i]);
            t_momentum = t_next;
        } else {
            z = x_next;
        }
        x = std::move(x_next);

        res.history.push_back(objective(x));
        const double total = res.history.back().total;
        if (!(total <= 10.0 * initial) && initial > 0.0) {
            std::ostringstream msg;
            msg << "fista_reconstruct: diverged at iteration " << (k + 1) << " (objective " << total
                << " vs initial " << initial << "; step " << tau << ", lambda " << lambda << ")";
            throw std::runtime_error(msg.str());
        }
        if (cfg.tolerance > 0.0 && k > 0) {
            const double prev = res.history[res.history.size() - 2].total;
            const double denom = std::max(std::abs(prev), 1e-30);
            if (std::abs(prev - total) / denom < cfg.tolerance) break;
        }
    }
    res.image = std::move(x);
    return res;
}

/// Phase-difference velocity and magnitude extraction:
/// v_c = angle(x_c · conj(x_ref)) · venc / π,  m = |x_ref|.
inline void extract_velocity_magnitude(const NdArray<std::complex<float>>& recon,  // [4][nx][ny][nz]
                                       double venc, float* v_out[3], float* m_out) {
    require(recon.ndim() == 4 && recon.dim(0) == kNumEncodings,
            "extract_velocity_magnitude: expected 4 encodings");
    require(venc > 0.0, "extract_velocity_magnitude: venc must be positive");
    const std::size_t nvox = recon.size() / kNumEncodings;
    const std::complex<float>* ref = recon.data();
    for (std::size_t e = 1; e < kNumEncodings; ++e) {
        const std::complex<float>* xc = recon.data() + e * nvox;
        float* v = v_out[e - 1];
        for (std::size_t p = 0; p < nvox; ++p) {
            const std::complex<double> prod =
                std::complex<double>(xc[p].real(), xc[p].imag()) *
                std::conj(std::complex<double>(ref[p].real(), ref[p].imag()));
            v[p] = static_cast<float>(std::arg(prod) * venc / M_PI);
        }
    }
    for (std::size_t p = 0; p < nvox; ++p) m_out[p] = std::abs(ref[p]);
}

/// Reconstruct every (encoding, frame) of a sampled acquisition and extract
/// velocity/magnitude. Frames and encodings are independent FISTA problems.
/// The fluid mask is not recoverable from k-space and is supplied by the
/// caller (simulation ground truth).
inline VelocityField4D reconstruct_field(const MultiCoilKSpace& ks, const CoilArray& coils,
                                         const FistaConfig& cfg, double dx, double dt,
                                         const NdArray<std::uint8_t>& fluid_mask,
                                         std::vector<std::vector<ObjectiveSample>>* histories = nullptr) {
    Grid4D grid{ks.nx(), ks.ny(), ks.nz(), ks.nt(), dx, dt};
    grid.validate();
    require(fluid_mask.ndim() == 3 && fluid_mask.dim(0) == grid.nx && fluid_mask.dim(1) == grid.ny &&
                fluid_mask.dim(2) == grid.nz,
            "reconstruct_field: fluid mask does not match grid");
    require(ks.n_encodings() == kNumEncodings, "reconstruct_field: expected 4 encodings");

    const std::size_t nvox = grid.voxels();
    NdArray<std::complex<float>> images({kNumEncodings, grid.nt, grid.nx, grid.ny, grid.nz});
    const std::size_t n_jobs = kNumEncodings * grid.nt;
    std::vector<std::vector<ObjectiveSample>> hist(n_jobs);

    parallel_for(n_jobs, [&](std::size_t job) {
        const std::size_t e = job / grid.nt;
        const std::size_t t = job % grid.nt;
        const auto op = make_encoding_operator<float>(coils, ks.pattern.masks, t);
        NdArray<std::complex<float>> y({ks.n_coils(), grid.nx, grid.ny, grid.nz});
        std::copy_n(ks.data.data() + (e * grid.nt + t) * y.size(), y.size(), y.data());
        auto res = fista_reconstruct(y, op, cfg);
        std::copy_n(res.image.data(), nvox, images.data() + (e * grid.nt + t) * nvox);
        hist[job] = std::move(res.history);
    });
    if (histories) *histories = std::move(hist);

    VelocityField4D out = VelocityField4D::zeros(grid);
    out.fluid_mask = fluid_mask;
    NdArray<std::complex<float>> frame_recon({kNumEncodings, grid.nx, grid.ny, grid.nz});
    for (std::size_t t = 0; t < grid.nt; ++t) {
        for (std::size_t e = 0; e < kNumEncodings; ++e)
            std::copy_n(images.data() + (e * grid.nt + t) * nvox, nvox,
                        frame_recon.data() + e * nvox);
        float* v_out[3];
        for (std::size_t c = 0; c < 3; ++c) v_out[c] = out.v.data() + (c * grid.nt + t) * nvox;
        extract_velocity_magnitude(frame_recon, ks.config.venc, v_out, out.magnitude.data() + t * nvox);
    }
    out.validate();
    return out;
}

} // namespace tempoflow

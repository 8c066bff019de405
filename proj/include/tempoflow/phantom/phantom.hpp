#pragma once

#include <array>
#include <cmath>
#include <string>

#include "tempoflow/core/grid.hpp"

namespace tempoflow {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline Axis axis_from_string(const std::string& s) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw std::invalid_argument("unknown axis '" + s + "'");
}

/// Two-bump periodic waveform: a systolic peak and a diastolic (E-wave) peak,
/// each a circular Gaussian bump with unit maximum.
struct WaveformSpec {
    double t_systole = 150.0;   ///< systolic peak time [ms]
    double sigma_systole = 60.0;
    double a_systole = 1.0;
    double t_diastole = 450.0;  ///< diastolic peak time [ms]
    double sigma_diastole = 45.0;
    double a_diastole = 0.6;
    double period = 640.0;      ///< cycle length T [ms]

    void validate() const {
        require(period > 0.0, "WaveformSpec: period must be > 0");
        require(t_systole >= 0.0 && t_systole < t_diastole && t_diastole < period,
                "WaveformSpec: need 0 <= t_systole < t_diastole < period");
        require(a_systole >= 0.0 && a_diastole >= 0.0, "WaveformSpec: amplitudes must be >= 0");
        require(sigma_systole > 0.0 && sigma_diastole > 0.0, "WaveformSpec: widths must be > 0");
    }
};

namespace detail {

/// Gaussian bump in circular time, max value 1 at t == center (mod period).
inline double periodic_bump(double t, double center, double sigma, double period) {
    double d = std::fmod(t - center, period);
    if (d < 0.0) d += period;
    d = std::min(d, period - d);
    return std::exp(-0.5 * (d / sigma) * (d / sigma));
}

} // namespace detail

inline double waveform_value(const WaveformSpec& w, double t_ms) {
    return w.a_systole * detail::periodic_bump(t_ms, w.t_systole, w.sigma_systole, w.period) +
           w.a_diastole * detail::periodic_bump(t_ms, w.t_diastole, w.sigma_diastole, w.period);
}

struct MagnitudeContrast {
    double fluid_level = 1.0;
    double tissue_level = 0.3;

    void validate() const {
        require(fluid_level > 0.0 && tissue_level > 0.0, "MagnitudeContrast: levels must be > 0");
    }
};

/// Rigid straight tube with pulsatile Poiseuille flow. The axial velocity is
/// u(r, t) = V_max * w(t) * (1 - (r/R)^2) inside the tube and zero outside;
/// transverse components are zero.
struct TubePhantomSpec {
    Axis tube_axis = Axis::Z;
    double tube_radius = 16.0;              ///< R [mm]
    std::array<double, 2> center = {0, 0};  ///< transverse center [mm], relative to grid center
    WaveformSpec waveform;
    double peak_velocity = 1.0;             ///< V_max [m/s]
    MagnitudeContrast magnitude;
};

/// Solid-body vortex in a sphere: u = omega(t) x r, with |omega| scaled so
/// the peak speed on the sphere surface is V_max. Exercises all three
/// velocity components when the rotation axis is oblique.
struct VortexPhantomSpec {
    double sphere_radius = 18.0;            ///< [mm]
    std::array<double, 3> rotation_axis = {1.0, 1.0, 1.0};
    WaveformSpec waveform;
    double peak_velocity = 1.0;             ///< V_max [m/s]
    MagnitudeContrast magnitude;
};

struct PhantomSpec {
    enum class Kind { Tube, Vortex } kind = Kind::Tube;
    TubePhantomSpec tube;
    VortexPhantomSpec vortex;
};

namespace detail {

inline void fill_tube_frame(VelocityField4D& f, const TubePhantomSpec& spec, std::size_t frame, double w_t) {
    const Grid4D& g = f.grid;
    const int axis = static_cast<int>(spec.tube_axis);
    const double half[3] = {0.5 * static_cast<double>(g.nx - 1), 0.5 * static_cast<double>(g.ny - 1),
                            0.5 * static_cast<double>(g.nz - 1)};
    const int trans[2] = {axis == 0 ? 1 : 0, axis == 2 ? 1 : 2};
    float* vax = &f.v(static_cast<std::size_t>(axis), frame, 0, 0, 0);
    float* mag = &f.magnitude(frame, 0, 0, 0);
    std::size_t i = 0;
    for (std::size_t x = 0; x < g.nx; ++x)
        for (std::size_t y = 0; y < g.ny; ++y)
            for (std::size_t z = 0; z < g.nz; ++z, ++i) {
                const double p[3] = {(static_cast<double>(x) - half[0]) * g.dx,
                                     (static_cast<double>(y) - half[1]) * g.dx,
                                     (static_cast<double>(z) - half[2]) * g.dx};
                const double u = p[trans[0]] - spec.center[0];
                const double v = p[trans[1]] - spec.center[1];
                const double r2 = u * u + v * v;
                const double R2 = spec.tube_radius * spec.tube_radius;
                if (r2 < R2) {
                    vax[i] = static_cast<float>(spec.peak_velocity * w_t * (1.0 - r2 / R2));
                    mag[i] = static_cast<float>(spec.magnitude.fluid_level);
                    f.fluid_mask[i] = 1;
                } else {
                    mag[i] = static_cast<float>(spec.magnitude.tissue_level);
                }
            }
}

inline void fill_vortex_frame(VelocityField4D& f, const VortexPhantomSpec& spec, std::size_t frame, double w_t) {
    const Grid4D& g = f.grid;
    const double half[3] = {0.5 * static_cast<double>(g.nx - 1), 0.5 * static_cast<double>(g.ny - 1),
                            0.5 * static_cast<double>(g.nz - 1)};
    double n[3] = {spec.rotation_axis[0], spec.rotation_axis[1], spec.rotation_axis[2]};
    const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    require(nn > 0.0, "VortexPhantomSpec: rotation axis must be nonzero");
    for (double& c : n) c /= nn;
    // |u| = |omega| * dist_to_axis; peak speed V_max is reached at dist = R.
    const double omega_mag = spec.peak_velocity / spec.sphere_radius;
    const double w0 = omega_mag * w_t;
    const std::size_t nvox = g.voxels();
    float* vx = &f.v(0, frame, 0, 0, 0);
    float* vy = &f.v(1, frame, 0, 0, 0);
    float* vz = &f.v(2, frame, 0, 0, 0);
    float* mag = &f.magnitude(frame, 0, 0, 0);
    (void)nvox;
    std::size_t i = 0;
    for (std::size_t x = 0; x < g.nx; ++x)
        for (std::size_t y = 0; y < g.ny; ++y)
            for (std::size_t z = 0; z < g.nz; ++z, ++i) {
                const double p[3] = {(static_cast<double>(x) - half[0]) * g.dx,
                                     (static_cast<double>(y) - half[1]) * g.dx,
                                     (static_cast<double>(z) - half[2]) * g.dx};
                const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                if (r2 < spec.sphere_radius * spec.sphere_radius) {
                    vx[i] = static_cast<float>(w0 * (n[1] * p[2] - n[2] * p[1]));
                    vy[i] = static_cast<float>(w0 * (n[2] * p[0] - n[0] * p[2]));
                    vz[i] = static_cast<float>(w0 * (n[0] * p[1] - n[1] * p[0]));
                    mag[i] = static_cast<float>(spec.magnitude.fluid_level);
                    f.fluid_mask[i] = 1;
                } else {
                    mag[i] = static_cast<float>(spec.magnitude.tissue_level);
                }
            }
}

} // namespace detail

/// Evaluate a phantom on nt frames spaced dt apart. Sampling must cover whole
/// cycles: nt * dt == waveform period (up to rounding).
inline VelocityField4D evaluate_phantom(const PhantomSpec& spec, const Grid4D& spatial_grid,
                                        std::size_t nt, double dt) {
    require(dt > 0.0, "evaluate_phantom: dt must be > 0");
    const WaveformSpec& wf = spec.kind == PhantomSpec::Kind::Tube ? spec.tube.waveform : spec.vortex.waveform;
    wf.validate();
    require(std::abs(static_cast<double>(nt) * dt - wf.period) < 1e-9 * wf.period,
            "evaluate_phantom: nt * dt must equal the waveform period");
    if (spec.kind == PhantomSpec::Kind::Tube) {
        spec.tube.magnitude.validate();
        require(spec.tube.tube_radius > 0.0, "TubePhantomSpec: radius must be > 0");
        const int axis = static_cast<int>(spec.tube.tube_axis);
        const double ext[2] = {
            axis == 0 ? (spatial_grid.ny - 1) * spatial_grid.dx : (spatial_grid.nx - 1) * spatial_grid.dx,
            axis == 2 ? (spatial_grid.ny - 1) * spatial_grid.dx : (spatial_grid.nz - 1) * spatial_grid.dx};
        require(std::abs(spec.tube.center[0]) + spec.tube.tube_radius <= 0.5 * ext[0] &&
                    std::abs(spec.tube.center[1]) + spec.tube.tube_radius <= 0.5 * ext[1],
                "TubePhantomSpec: tube exceeds grid bounds");
    } else {
        spec.vortex.magnitude.validate();
        require(spec.vortex.sphere_radius > 0.0, "VortexPhantomSpec: radius must be > 0");
    }

    Grid4D g = spatial_grid;
    g.nt = nt;
    g.dt = dt;
    VelocityField4D f = VelocityField4D::zeros(g);
    for (std::size_t frame = 0; frame < nt; ++frame) {
        const double t = static_cast<double>(frame) * dt;
        const double w_t = waveform_value(wf, t);
        if (spec.kind == PhantomSpec::Kind::Tube)
            detail::fill_tube_frame(f, spec.tube, frame, w_t);
        else
            detail::fill_vortex_frame(f, spec.vortex, frame, w_t);
    }
    return f;
}

/// High-resolution ground truth plus its frame-aligned low-resolution
/// counterpart: LR frame i is bitwise equal to HR frame 2i.
inline std::pair<VelocityField4D, VelocityField4D> evaluate_phantom_pair(const PhantomSpec& spec,
                                                                         const Grid4D& spatial_grid,
                                                                         std::size_t nt_hr, double dt_hr) {
    require(nt_hr % 2 == 0, "evaluate_phantom_pair: nt_hr must be even");
    VelocityField4D hr = evaluate_phantom(spec, spatial_grid, nt_hr, dt_hr);

    Grid4D lr_grid = hr.grid;
    lr_grid.nt = nt_hr / 2;
    lr_grid.dt = 2.0 * dt_hr;
    VelocityField4D lr = VelocityField4D::zeros(lr_grid);
    lr.fluid_mask = hr.fluid_mask;
    const std::size_t nvox = hr.grid.voxels();
    for (std::size_t i = 0; i < lr_grid.nt; ++i) {
        for (int c = 0; c < 3; ++c)
            std::copy_n(&hr.v(static_cast<std::size_t>(c), 2 * i, 0, 0, 0), nvox,
                        &lr.v(static_cast<std::size_t>(c), i, 0, 0, 0));
        std::copy_n(&hr.magnitude(2 * i, 0, 0, 0), nvox, &lr.magnitude(i, 0, 0, 0));
    }
    return {std::move(hr), std::move(lr)};
}

} // namespace tempoflow

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tempoflow/core/grid.hpp"
#include "tempoflow/core/regions.hpp"

namespace tempoflow {

enum class Region { Fluid, Boundary, NonFluid };

inline std::string region_name(Region r) {
    switch (r) {
        case Region::Fluid: return "fluid";
        case Region::Boundary: return "boundary";
        default: return "nonfluid";
    }
}

/// "fluid" means all fluid voxels; "boundary" is the fluid sub-shell.
inline bool region_contains(RegionLabel label, Region region) {
    switch (region) {
        case Region::Fluid: return label != RegionLabel::NonFluid;
        case Region::Boundary: return label == RegionLabel::FluidBoundary;
        default: return label == RegionLabel::NonFluid;
    }
}

namespace detail {

inline std::vector<std::size_t> frames_or_all(const std::vector<std::size_t>& frames, std::size_t nt) {
    if (!frames.empty()) {
        for (auto f : frames) require(f < nt, "metrics: frame index out of range");
        return frames;
    }
    std::vector<std::size_t> all(nt);
    for (std::size_t t = 0; t < nt; ++t) all[t] = t;
    return all;
}

inline void check_comparable(const VelocityField4D& truth, const VelocityField4D& pred) {
    require(truth.grid == pred.grid, "metrics: fields live on different grids");
}

} // namespace detail

struct LinregResult {
    double k = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares of y against x (x on the abscissa), with intercept.
inline LinregResult linreg(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "linreg: size mismatch");
    require(x.size() >= 2, "linreg: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, "linreg: degenerate variance in x");
    LinregResult r;
    r.k = sxy / sxx;
    r.intercept = my - r.k * mx;
    if (syy == 0.0) {
        r.r2 = 1.0;  // y constant and exactly on the fit
    } else {
        const double ss_res = syy - r.k * sxy;
        r.r2 = 1.0 - ss_res / syy;
    }
    return r;
}

/// Eq.-(1)-style relative error: mean over region voxels/frames of
/// tanh(|v - v_hat| / |v|). Zero ground truth counts as tanh(inf) = 1 unless
/// the prediction matches exactly (0/0 -> 0). Multiply by 100 for MRE%.
inline double relative_error_tanh(const VelocityField4D& truth, const VelocityField4D& pred,
                                  const RegionLabels& labels, Region region,
                                  const std::vector<std::size_t>& frames = {}) {
    detail::check_comparable(truth, pred);
    const std::size_t nvox = truth.grid.voxels();
    const std::size_t nt = truth.grid.nt;
    const auto fs = detail::frames_or_all(frames, nt);

    double acc = 0.0;
    std::size_t count = 0;
    for (auto t : fs)
        for (std::size_t p = 0; p < nvox; ++p) {
            if (!region_contains(static_cast<RegionLabel>(labels.labels[p]), region)) continue;
            double nv = 0.0, nd = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = truth.v[(c * nt + t) * nvox + p];
                const double vh = pred.v[(c * nt + t) * nvox + p];
                nv += v * v;
                nd += (v - vh) * (v - vh);
            }
            nv = std::sqrt(nv);
            nd = std::sqrt(nd);
            if (nv == 0.0)
                acc += nd == 0.0 ? 0.0 : 1.0;
            else
                acc += std::tanh(nd / nv);
            ++count;
        }
    require(count > 0, "relative_error_tanh: empty region");
    return acc / static_cast<double>(count);
}

struct BasicErrors {
    double rmse = 0.0;
    double mae = 0.0;
};

/// Per-component RMSE and MAE over a region (voxelwise and framewise mean).
inline BasicErrors basic_errors(const VelocityField4D& truth, const VelocityField4D& pred,
                                const RegionLabels& labels, Region region, std::size_t component,
                                const std::vector<std::size_t>& frames = {}) {
    detail::check_comparable(truth, pred);
    require(component < 3, "basic_errors: component out of range");
    const std::size_t nvox = truth.grid.voxels();
    const std::size_t nt = truth.grid.nt;
    const auto fs = detail::frames_or_all(frames, nt);

    double se = 0.0, ae = 0.0;
    std::size_t count = 0;
    for (auto t : fs)
        for (std::size_t p = 0; p < nvox; ++p) {
            if (!region_contains(static_cast<RegionLabel>(labels.labels[p]), region)) continue;
            const double d = static_cast<double>(truth.v[(component * nt + t) * nvox + p]) -
                             pred.v[(component * nt + t) * nvox + p];
            se += d * d;
            ae += std::abs(d);
            ++count;
        }
    require(count > 0, "basic_errors: empty region");
    return {std::sqrt(se / static_cast<double>(count)), ae / static_cast<double>(count)};
}

/// Mean voxelwise cosine similarity (v . v_hat) / (|v| |v_hat| + eps);
/// both-zero pairs count as perfectly aligned.
inline double cosine_similarity(const VelocityField4D& truth, const VelocityField4D& pred,
                                const RegionLabels& labels, Region region,
                                const std::vector<std::size_t>& frames = {}) {
    detail::check_comparable(truth, pred);
    constexpr double kEps = 1e-12;
    const std::size_t nvox = truth.grid.voxels();
    const std::size_t nt = truth.grid.nt;
    const auto fs = detail::frames_or_all(frames, nt);

    double acc = 0.0;
    std::size_t count = 0;
    for (auto t : fs)
        for (std::size_t p = 0; p < nvox; ++p) {
            if (!region_contains(static_cast<RegionLabel>(labels.labels[p]), region)) continue;
            double dot = 0.0, nv = 0.0, nh = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = truth.v[(c * nt + t) * nvox + p];
                const double vh = pred.v[(c * nt + t) * nvox + p];
                dot += v * vh;
                nv += v * v;
                nh += vh * vh;
            }
            if (nv == 0.0 && nh == 0.0)
                acc += 1.0;
            else
                acc += dot / (std::sqrt(nv) * std::sqrt(nh) + kEps);
            ++count;
        }
    require(count > 0, "cosine_similarity: empty region");
    return acc / static_cast<double>(count);
}

/// Paired (truth, prediction) samples of one velocity component over a region.
inline void gather_component(const VelocityField4D& truth, const VelocityField4D& pred,
                             const RegionLabels& labels, Region region, std::size_t component,
                             const std::vector<std::size_t>& frames, std::vector<double>& x,
                             std::vector<double>& y) {
    detail::check_comparable(truth, pred);
    const std::size_t nvox = truth.grid.voxels();
    const std::size_t nt = truth.grid.nt;
    const auto fs = detail::frames_or_all(frames, nt);
    x.clear();
    y.clear();
    for (auto t : fs)
        for (std::size_t p = 0; p < nvox; ++p) {
            if (!region_contains(static_cast<RegionLabel>(labels.labels[p]), region)) continue;
            x.push_back(truth.v[(component * nt + t) * nvox + p]);
            y.push_back(pred.v[(component * nt + t) * nvox + p]);
        }
}

/// Regression that tolerates constant ground truth: exact agreement maps to
/// the ideal fit (k = 1, R^2 = 1), anything else to a flat fit at the mean.
inline LinregResult linreg_guarded(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && !x.empty(), "linreg_guarded: bad inputs");
    double mn = x[0], mx = x[0];
    for (double v : x) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    if (mx > mn) return linreg(x, y);
    bool exact = true;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] != x[i]) exact = false;
        mean_y += y[i];
    }
    mean_y /= static_cast<double>(x.size());
    if (exact) return {1.0, 0.0, 1.0};
    return {0.0, mean_y, 0.0};
}

/// Index of the synthesized (odd) frame with the largest mean fluid speed.
inline std::size_t peak_synthesized_frame(const VelocityField4D& truth) {
    truth.validate();
    require(truth.grid.nt >= 2, "peak_synthesized_frame: need at least two frames");
    const std::size_t nvox = truth.grid.voxels();
    const std::size_t nt = truth.grid.nt;
    std::size_t best = 1;
    double best_speed = -1.0;
    for (std::size_t t = 1; t < nt; t += 2) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t p = 0; p < nvox; ++p) {
            if (!truth.fluid_mask[p]) continue;
            double ss = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = truth.v[(c * nt + t) * nvox + p];
                ss += v * v;
            }
            acc += std::sqrt(ss);
            ++count;
        }
        require(count > 0, "peak_synthesized_frame: empty fluid mask");
        const double mean_speed = acc / static_cast<double>(count);
        if (mean_speed > best_speed) {
            best_speed = mean_speed;
            best = t;
        }
    }
    return best;
}

struct PlaneSpec {
    std::size_t axis = 2;       ///< plane normal (0 = x, 1 = y, 2 = z)
    std::size_t index = 0;      ///< central slice
    std::size_t thickness = 4;  ///< slab thickness in voxels
};

/// Mean in-mask velocity component normal to a slab, per frame.
inline std::vector<double> plane_flow_curve(const VelocityField4D& field, const PlaneSpec& plane) {
    field.validate();
    require(plane.axis < 3, "plane_flow_curve: axis out of range");
    require(plane.thickness >= 1, "plane_flow_curve: thickness must be >= 1");
    const std::size_t extent[3] = {field.grid.nx, field.grid.ny, field.grid.nz};
    require(plane.index < extent[plane.axis], "plane_flow_curve: plane outside grid");

    const std::size_t lo = plane.index >= plane.thickness / 2 ? plane.index - plane.thickness / 2 : 0;
    const std::size_t hi = std::min(extent[plane.axis], lo + plane.thickness);
    const std::size_t nvox = field.grid.voxels();
    const std::size_t nt = field.grid.nt;

    std::vector<std::size_t> slab;
    for (std::size_t x = 0; x < field.grid.nx; ++x)
        for (std::size_t y = 0; y < field.grid.ny; ++y)
            for (std::size_t z = 0; z < field.grid.nz; ++z) {
                const std::size_t along = plane.axis == 0 ? x : plane.axis == 1 ? y : z;
                if (along < lo || along >= hi) continue;
                const std::size_t p = (x * field.grid.ny + y) * field.grid.nz + z;
                if (field.fluid_mask[p]) slab.push_back(p);
            }
    require(!slab.empty(), "plane_flow_curve: no fluid voxels in slab");

    std::vector<double> curve(nt, 0.0);
    for (std::size_t t = 0; t < nt; ++t) {
        double acc = 0.0;
        for (auto p : slab) acc += field.v[(plane.axis * nt + t) * nvox + p];
        curve[t] = acc / static_cast<double>(slab.size());
    }
    return curve;
}

} // namespace tempoflow

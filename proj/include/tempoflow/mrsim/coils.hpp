#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tempoflow/core/grid.hpp"
#include "tempoflow/core/rng.hpp"

namespace tempoflow {

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }

/// Circular current loop discretized into straight segments.
struct CoilLoop {
    Vec3 center;
    Vec3 normal;   ///< unit loop normal
    double radius = 1.0;
};

/// Biot-Savart field of a unit-current loop at point p, with the mu0*I/(4*pi)
/// prefactor left out (a later normalization absorbs it):
///   B(p) = sum_seg dl x (p - s) / |p - s|^3
inline Vec3 biot_savart_loop(const CoilLoop& loop, Vec3 p, int n_segments = 64) {
    require(loop.radius > 0.0, "biot_savart_loop: degenerate loop (radius 0)");
    require(n_segments >= 3, "biot_savart_loop: need at least 3 segments");
    // orthonormal frame (e1, e2) spanning the loop plane
    Vec3 n = (1.0 / norm(loop.normal)) * loop.normal;
    Vec3 a = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 e1 = cross(n, a);
    e1 = (1.0 / norm(e1)) * e1;
    Vec3 e2 = cross(n, e1);

    Vec3 b{};
    for (int k = 0; k < n_segments; ++k) {
        const double th0 = 2.0 * M_PI * k / n_segments;
        const double th1 = 2.0 * M_PI * (k + 1) / n_segments;
        const Vec3 s0 = loop.center + loop.radius * (std::cos(th0) * e1 + std::sin(th0) * e2);
        const Vec3 s1 = loop.center + loop.radius * (std::cos(th1) * e1 + std::sin(th1) * e2);
        const Vec3 mid = 0.5 * (s0 + s1);
        const Vec3 dl = s1 - s0;
        const Vec3 r = p - mid;
        const double rn = norm(r);
        if (rn < 1e-9) continue;  // on the wire itself
        b = b + (1.0 / (rn * rn * rn)) * cross(dl, r);
    }
    return b;
}

/// Complex receive sensitivities of a set of loops, one map per coil.
struct CoilArray {
    NdArray<std::complex<float>> maps;  // [n_coils][nx][ny][nz]
    std::vector<CoilLoop> loops;

    std::size_t n_coils() const { return maps.dim(0); }
};

namespace detail {

/// Scale maps so the mean over the grid of the root-sum-of-squares
/// sensitivity equals 1.
inline void normalize_rss(NdArray<std::complex<float>>& maps) {
    const std::size_t n_coils = maps.dim(0);
    const std::size_t nvox = maps.size() / n_coils;
    double acc = 0.0;
    for (std::size_t p = 0; p < nvox; ++p) {
        double ss = 0.0;
        for (std::size_t c = 0; c < n_coils; ++c) ss += std::norm(maps[c * nvox + p]);
        acc += std::sqrt(ss);
    }
    const double mean_rss = acc / static_cast<double>(nvox);
    require(mean_rss > 0.0, "normalize_rss: all-zero sensitivity maps");
    const float scale = static_cast<float>(1.0 / mean_rss);
    for (auto& m : maps) m *= scale;
}

} // namespace detail

/// Simulate receiver sensitivities for loops equally spaced on a cylinder
/// enclosing the grid (cylinder axis along z). The complex sensitivity is the
/// transverse field B_x + i*B_y of each loop, normalized so the mean
/// root-sum-of-squares over the grid is 1.
inline CoilArray simulate_coil_maps(const Grid4D& grid, std::size_t n_coils_total, int n_segments = 64) {
    require(n_coils_total >= 1, "simulate_coil_maps: need at least one coil");
    grid.validate();

    const double ext_x = static_cast<double>(grid.nx - 1) * grid.dx;
    const double ext_y = static_cast<double>(grid.ny - 1) * grid.dx;
    const double ext_z = static_cast<double>(grid.nz - 1) * grid.dx;
    const double cyl_radius = 0.75 * std::hypot(ext_x, ext_y);  // clears the grid corners
    const double loop_radius = std::max(0.25 * cyl_radius, 1e-3);

    CoilArray coils;
    coils.maps = NdArray<std::complex<float>>({n_coils_total, grid.nx, grid.ny, grid.nz});
    coils.loops.reserve(n_coils_total);

    // Rings of loops spread along z, equal angular spacing, normals pointing
    // at the cylinder axis.
    const std::size_t per_ring = std::min<std::size_t>(n_coils_total, 8);
    const std::size_t n_rings = (n_coils_total + per_ring - 1) / per_ring;
    for (std::size_t c = 0; c < n_coils_total; ++c) {
        const std::size_t ring = c / per_ring;
        const std::size_t in_ring = c % per_ring;
        const std::size_t ring_size = std::min(per_ring, n_coils_total - ring * per_ring);
        const double angle = 2.0 * M_PI * in_ring / static_cast<double>(ring_size) +
                             (ring % 2 == 1 ? M_PI / static_cast<double>(per_ring) : 0.0);
        const double zfrac = n_rings == 1 ? 0.0
                                          : (static_cast<double>(ring) / (n_rings - 1) - 0.5);
        CoilLoop loop;
        loop.center = {cyl_radius * std::cos(angle), cyl_radius * std::sin(angle), zfrac * ext_z};
        loop.normal = {-std::cos(angle), -std::sin(angle), 0.0};
        loop.radius = loop_radius;
        coils.loops.push_back(loop);
    }

    const double half[3] = {0.5 * (grid.nx - 1.0), 0.5 * (grid.ny - 1.0), 0.5 * (grid.nz - 1.0)};
    for (std::size_t c = 0; c < n_coils_total; ++c) {
        std::size_t i = c * grid.voxels();
        for (std::size_t x = 0; x < grid.nx; ++x)
            for (std::size_t y = 0; y < grid.ny; ++y)
                for (std::size_t z = 0; z < grid.nz; ++z, ++i) {
                    const Vec3 p{(x - half[0]) * grid.dx, (y - half[1]) * grid.dx, (z - half[2]) * grid.dx};
                    const Vec3 b = biot_savart_loop(coils.loops[c], p, n_segments);
                    coils.maps[i] = {static_cast<float>(b.x), static_cast<float>(b.y)};
                }
    }
    detail::normalize_rss(coils.maps);
    return coils;
}

/// Keep k coils, chosen uniformly at random by seed, renormalized so the
/// retained subset has mean root-sum-of-squares 1. Selecting all coils is the
/// identity.
inline CoilArray select_active_coils(const CoilArray& coils, std::size_t k, std::uint64_t seed) {
    const std::size_t n = coils.n_coils();
    require(k >= 1 && k <= n, "select_active_coils: k must be in [1, n_coils]");
    if (k == n) return coils;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = substream(seed, "active-coils");
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(k);
    std::sort(order.begin(), order.end());

    const std::size_t nvox = coils.maps.size() / n;
    CoilArray out;
    out.maps = NdArray<std::complex<float>>({k, coils.maps.dim(1), coils.maps.dim(2), coils.maps.dim(3)});
    for (std::size_t j = 0; j < k; ++j) {
        std::copy_n(coils.maps.data() + order[j] * nvox, nvox, out.maps.data() + j * nvox);
        out.loops.push_back(coils.loops[order[j]]);
    }
    detail::normalize_rss(out.maps);
    return out;
}

} // namespace tempoflow

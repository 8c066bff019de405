#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "tempoflow/baselines/interp.hpp"

using namespace tempoflow;

namespace {

VelocityField4D series_field(const std::vector<double>& series) {
    Grid4D g{3, 3, 2, series.size(), 2.0, 40.0};
    VelocityField4D f = VelocityField4D::zeros(g);
    const std::size_t nvox = g.voxels();
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t t = 0; t < g.nt; ++t)
            for (std::size_t p = 0; p < nvox; ++p)
                f.v[(c * g.nt + t) * nvox + p] =
                    static_cast<float>(series[t] * (c + 1) * 0.25 * (p + 1));
    for (std::size_t t = 0; t < g.nt; ++t)
        for (std::size_t p = 0; p < nvox; ++p)
            f.magnitude[t * nvox + p] = static_cast<float>(0.5 + 0.02 * static_cast<double>(t) * (p % 3));
    f.fluid_mask.fill(0);
    f.fluid_mask[4] = 1;
    return f;
}

double mean_of(const std::vector<double>& s) {
    double acc = 0.0;
    for (double v : s) acc += v;
    return acc / static_cast<double>(s.size());
}

} // namespace

TEST(LinearSeries, TwoFrameDoublingAndConstant) {
    const std::vector<double> two = {3.0, 7.0};
    const auto up = linear_upsample_series(two, 2);
    ASSERT_EQ(up.size(), 4u);
    EXPECT_EQ(up[0], 3.0);
    EXPECT_EQ(up[1], 5.0);  // (a+b)/2
    EXPECT_EQ(up[2], 7.0);
    EXPECT_EQ(up[3], 5.0);  // wraps: (b+a)/2

    const std::vector<double> c(5, 1.25);
    for (double v : linear_upsample_series(c, 3)) EXPECT_EQ(v, 1.25);
}

TEST(LinearSeries, LinearRampInteriorMidpointsExact) {
    std::vector<double> ramp(8);
    for (std::size_t t = 0; t < 8; ++t) ramp[t] = 2.0 + 3.0 * static_cast<double>(t);
    const auto up = linear_upsample_series(ramp, 2);
    for (std::size_t t = 0; t + 1 < 8; ++t) {
        EXPECT_EQ(up[2 * t], ramp[t]);
        EXPECT_EQ(up[2 * t + 1], 2.0 + 3.0 * (static_cast<double>(t) + 0.5));
    }
    // the final midpoint wraps around the cycle instead of extrapolating
    EXPECT_EQ(up[15], 0.5 * (ramp[7] + ramp[0]));
}

TEST(SincSeries, RecoversBandLimitedSinusoid) {
    const std::size_t n = 4;
    const double amp = 0.8, phase = 0.6, offset = 0.2;
    std::vector<double> s(n);
    for (std::size_t t = 0; t < n; ++t)
        s[t] = offset + amp * std::cos(2.0 * M_PI * static_cast<double>(t) / n + phase);
    const auto up = sinc_upsample_series(s, 2);
    ASSERT_EQ(up.size(), 2 * n);
    for (std::size_t t = 0; t < 2 * n; ++t) {
        const double want = offset + amp * std::cos(M_PI * static_cast<double>(t) / n + phase);
        EXPECT_NEAR(up[t], want, 1e-9);
    }
}

TEST(SincSeries, ConstantAndInputFramePassThrough) {
    const std::vector<double> c(6, -0.75);
    for (double v : sinc_upsample_series(c, 2)) EXPECT_NEAR(v, -0.75, 1e-12);

    std::vector<double> s = {0.3, -1.1, 0.9, 2.0, -0.4, 0.5};
    const auto up = sinc_upsample_series(s, 2);
    for (std::size_t t = 0; t < s.size(); ++t) EXPECT_NEAR(up[2 * t], s[t], 1e-9);
}

TEST(Upsampling, PreservesTemporalMean) {
    std::vector<double> s = {1.0, 0.25, -2.0, 4.0, 0.125, 3.5, -1.0, 0.0};
    const double m = mean_of(s);
    EXPECT_NEAR(mean_of(linear_upsample_series(s, 2)), m, 1e-9);
    EXPECT_NEAR(mean_of(sinc_upsample_series(s, 2)), m, 1e-9);
}

TEST(Upsampling, IsLinearInItsInput) {
    std::vector<double> a = {0.2, 1.4, -0.6, 2.2}, b = {1.0, -1.0, 0.5, 0.25};
    std::vector<double> mix(4);
    const double ca = 1.75, cb = -0.5;
    for (std::size_t t = 0; t < 4; ++t) mix[t] = ca * a[t] + cb * b[t];
    for (auto* fn : {&sinc_upsample_series<double>, &linear_upsample_series<double>}) {
        const auto ua = fn(a, 2), ub = fn(b, 2), um = fn(mix, 2);
        for (std::size_t t = 0; t < 8; ++t) EXPECT_NEAR(um[t], ca * ua[t] + cb * ub[t], 1e-9);
    }
}

TEST(FieldInterp, DoublesFramesHalvesDtKeepsMask) {
    VelocityField4D f = series_field({0.1, 0.9, 0.4, 0.7});
    for (auto* fn : {&linear_interp_time, &sinc_interp_time}) {
        VelocityField4D up = fn(f, 2);
        EXPECT_EQ(up.grid.nt, 8u);
        EXPECT_DOUBLE_EQ(up.grid.dt, 20.0);
        EXPECT_EQ(up.grid.nx, f.grid.nx);
        ASSERT_EQ(up.fluid_mask.size(), f.fluid_mask.size());
        EXPECT_EQ(std::memcmp(up.fluid_mask.data(), f.fluid_mask.data(), f.fluid_mask.size()), 0);
        // even output frames reproduce the input frames (no denoising)
        const std::size_t nvox = f.grid.voxels();
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t t = 0; t < 4; ++t)
                for (std::size_t p = 0; p < nvox; ++p)
                    EXPECT_NEAR(up.v[(c * 8 + 2 * t) * nvox + p], f.v[(c * 4 + t) * nvox + p], 1e-6);
    }
}

TEST(FieldInterp, LinearFieldMidpointsMatchSeriesOracle) {
    VelocityField4D f = series_field({0.0, 1.0, 0.5, 0.25});
    VelocityField4D up = linear_interp_time(f, 2);
    const std::size_t nvox = f.grid.voxels();
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t t = 0; t < 4; ++t)
            for (std::size_t p = 0; p < nvox; ++p) {
                const float a = f.v[(c * 4 + t) * nvox + p];
                const float b = f.v[(c * 4 + (t + 1) % 4) * nvox + p];
                EXPECT_FLOAT_EQ(up.v[(c * 8 + 2 * t + 1) * nvox + p], 0.5f * (a + b));
            }
}

TEST(FieldInterp, SincClampsNegativeMagnitudeOvershoot) {
    Grid4D g{2, 2, 2, 8, 2.0, 40.0};
    VelocityField4D f = VelocityField4D::zeros(g);
    std::vector<double> spike(8, 0.0);
    spike[1] = 1.0;
    const std::size_t nvox = g.voxels();
    for (std::size_t t = 0; t < 8; ++t)
        for (std::size_t p = 0; p < nvox; ++p) f.magnitude[t * nvox + p] = static_cast<float>(spike[t]);

    const auto up_series = sinc_upsample_series(spike, 2);
    double min_series = 0.0;
    std::size_t min_t = 0;
    for (std::size_t t = 0; t < up_series.size(); ++t)
        if (up_series[t] < min_series) { min_series = up_series[t]; min_t = t; }
    ASSERT_LT(min_series, -1e-3);  // the Dirichlet kernel must overshoot below zero

    VelocityField4D up = sinc_interp_time(f, 2);
    for (const float m : up.magnitude) EXPECT_GE(m, 0.0f);
    EXPECT_EQ(up.magnitude[min_t * nvox], 0.0f);
}

TEST(FieldInterp, RejectsDegenerateInputs) {
    EXPECT_THROW(linear_upsample_series(std::vector<double>{1.0}, 2), std::invalid_argument);
    EXPECT_THROW(sinc_upsample_series(std::vector<double>{1.0}, 2), std::invalid_argument);
    Grid4D g{2, 2, 2, 1, 2.0, 40.0};
    VelocityField4D f = VelocityField4D::zeros(g);
    EXPECT_THROW(linear_interp_time(f, 2), std::invalid_argument);
    EXPECT_THROW(sinc_interp_time(f, 2), std::invalid_argument);
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "tempoflow/evaluate/metrics.hpp"
#include "tempoflow/evaluate/report.hpp"
#include "tempoflow/phantom/phantom.hpp"

using namespace tempoflow;

namespace {

VelocityField4D make_field(std::size_t nx, std::size_t ny, std::size_t nz, std::size_t nt) {
    VelocityField4D f = VelocityField4D::zeros({nx, ny, nz, nt, 2.0, 40.0});
    for (auto& m : f.fluid_mask) m = 1;
    return f;
}

float& vat(VelocityField4D& f, std::size_t c, std::size_t t, std::size_t p) {
    return f.v[(c * f.grid.nt + t) * f.grid.voxels() + p];
}

RegionLabels labels_of(const VelocityField4D& f) { return classify_regions(f.fluid_mask); }

/// Narrow pulsatile tube with all three region classes populated.
VelocityField4D tube_field(std::size_t nt, double dt, double t_systole = 150.0) {
    PhantomSpec s;
    s.tube.tube_radius = 6.0;
    s.tube.waveform.t_systole = t_systole;
    return evaluate_phantom(s, {12, 12, 8, 1, 2.0, 1.0}, nt, dt);
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    return lines;
}

} // namespace

TEST(TanhRelError, PinnedHandValues) {
    // single fluid voxel, truth (0.1, 0, 0) vs prediction (0.2, 0, 0): ratio 1
    VelocityField4D truth = make_field(1, 1, 1, 1);
    VelocityField4D pred = truth;
    vat(truth, 0, 0, 0) = 0.1f;
    vat(pred, 0, 0, 0) = 0.2f;
    const auto labels = labels_of(truth);
    EXPECT_DOUBLE_EQ(relative_error_tanh(truth, pred, labels, Region::Fluid), std::tanh(1.0));
    EXPECT_NEAR(relative_error_tanh(truth, pred, labels, Region::Fluid), 0.761594, 1e-6);

    // perfect prediction is exactly zero
    EXPECT_DOUBLE_EQ(relative_error_tanh(truth, truth, labels, Region::Fluid), 0.0);

    // all-zero prediction of a nonzero field saturates the ratio at 1 per voxel
    VelocityField4D uni = make_field(4, 4, 4, 2);
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t p = 0; p < uni.grid.voxels(); ++p) {
            vat(uni, 0, t, p) = 0.3f;
            vat(uni, 1, t, p) = 0.4f;
        }
    const VelocityField4D zero = make_field(4, 4, 4, 2);
    EXPECT_NEAR(relative_error_tanh(uni, zero, labels_of(uni), Region::Fluid), std::tanh(1.0), 1e-12);
}

TEST(TanhRelError, ZeroTruthRulesAndBounds) {
    // voxel 0: 0/0 counts as 0, voxel 1: nonzero error over zero truth counts as 1
    VelocityField4D truth = make_field(2, 1, 1, 1);
    VelocityField4D pred = truth;
    vat(pred, 0, 0, 1) = 0.3f;
    EXPECT_DOUBLE_EQ(relative_error_tanh(truth, pred, labels_of(truth), Region::Fluid), 0.5);

    // random fields stay inside [0, 1]
    std::mt19937 rng(314);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    VelocityField4D a = make_field(5, 4, 3, 2), b = a;
    for (auto& x : a.v) x = dist(rng);
    for (auto& x : b.v) x = dist(rng);
    const double e = relative_error_tanh(a, b, labels_of(a), Region::Fluid);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
}

TEST(TanhRelError, FrameSubsetsAndEmptyRegion) {
    VelocityField4D truth = make_field(2, 2, 1, 2);
    VelocityField4D pred = truth;
    for (std::size_t p = 0; p < 4; ++p) vat(truth, 0, 1, p) = 0.5f;  // frame 1 mispredicted as zero
    const auto labels = labels_of(truth);
    EXPECT_DOUBLE_EQ(relative_error_tanh(truth, pred, labels, Region::Fluid), std::tanh(1.0) / 2.0);
    EXPECT_DOUBLE_EQ(relative_error_tanh(truth, pred, labels, Region::Fluid, {0}), 0.0);
    EXPECT_DOUBLE_EQ(relative_error_tanh(truth, pred, labels, Region::Fluid, {1}), std::tanh(1.0));
    EXPECT_THROW(relative_error_tanh(truth, pred, labels, Region::Fluid, {2}), std::invalid_argument);
    // the mask is all fluid, so the non-fluid region is empty
    EXPECT_THROW(relative_error_tanh(truth, pred, labels, Region::NonFluid), std::invalid_argument);
}

TEST(BasicErrors, ConstantAndAlternatingOffsets) {
    VelocityField4D truth = make_field(4, 4, 2, 2);
    for (auto& x : truth.v) x = 1.5f;
    VelocityField4D pred = truth;
    const auto labels = labels_of(truth);

    const auto zero = basic_errors(truth, pred, labels, Region::Fluid, 1);
    EXPECT_DOUBLE_EQ(zero.rmse, 0.0);
    EXPECT_DOUBLE_EQ(zero.mae, 0.0);

    // constant offset c on one component: RMSE = MAE = c there, 0 elsewhere
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t p = 0; p < truth.grid.voxels(); ++p) vat(pred, 1, t, p) = 1.75f;
    auto e = basic_errors(truth, pred, labels, Region::Fluid, 1);
    EXPECT_DOUBLE_EQ(e.rmse, 0.25);
    EXPECT_DOUBLE_EQ(e.mae, 0.25);
    e = basic_errors(truth, pred, labels, Region::Fluid, 0);
    EXPECT_DOUBLE_EQ(e.rmse, 0.0);

    // alternating +/-c: RMSE and MAE both still equal c
    for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t p = 0; p < truth.grid.voxels(); ++p)
            vat(pred, 1, t, p) = p % 2 ? 1.25f : 1.75f;
    e = basic_errors(truth, pred, labels, Region::Fluid, 1);
    EXPECT_DOUBLE_EQ(e.rmse, 0.25);
    EXPECT_DOUBLE_EQ(e.mae, 0.25);

    EXPECT_THROW(basic_errors(truth, pred, labels, Region::Fluid, 3), std::invalid_argument);
}

TEST(BasicErrors, RespectsRegionMembership) {
    VelocityField4D truth = make_field(6, 4, 4, 1);
    for (std::size_t p = 0; p < truth.grid.voxels(); ++p)
        truth.fluid_mask[p] = p < truth.grid.voxels() / 2 ? 1 : 0;
    VelocityField4D pred = truth;
    // corrupt only the non-fluid half
    for (std::size_t p = truth.grid.voxels() / 2; p < truth.grid.voxels(); ++p)
        vat(pred, 0, 0, p) = 0.25f;
    const auto labels = labels_of(truth);
    EXPECT_DOUBLE_EQ(basic_errors(truth, pred, labels, Region::Fluid, 0).mae, 0.0);
    EXPECT_DOUBLE_EQ(basic_errors(truth, pred, labels, Region::Boundary, 0).mae, 0.0);
    EXPECT_DOUBLE_EQ(basic_errors(truth, pred, labels, Region::NonFluid, 0).mae, 0.25);
    EXPECT_DOUBLE_EQ(basic_errors(truth, pred, labels, Region::NonFluid, 0).rmse, 0.25);
}

TEST(Cosine, AlignmentCases) {
    VelocityField4D truth = make_field(3, 3, 2, 2);
    std::mt19937 rng(99);
    std::uniform_real_distribution<float> dist(0.2f, 1.0f);
    for (auto& x : truth.v) x = dist(rng);
    const auto labels = labels_of(truth);

    VelocityField4D scaled = truth;
    for (auto& x : scaled.v) x *= 3.0f;
    EXPECT_NEAR(cosine_similarity(truth, scaled, labels, Region::Fluid), 1.0, 1e-9);

    VelocityField4D flipped = truth;
    for (auto& x : flipped.v) x = -x;
    EXPECT_NEAR(cosine_similarity(truth, flipped, labels, Region::Fluid), -1.0, 1e-9);

    // orthogonal vectors have an exactly zero dot product
    VelocityField4D ex = make_field(2, 2, 2, 1), ey = ex;
    for (std::size_t p = 0; p < 8; ++p) {
        vat(ex, 0, 0, p) = 0.6f;
        vat(ey, 1, 0, p) = 0.8f;
    }
    EXPECT_DOUBLE_EQ(cosine_similarity(ex, ey, labels_of(ex), Region::Fluid), 0.0);

    // two zero vectors count as perfectly aligned
    const VelocityField4D z = make_field(2, 2, 2, 1);
    EXPECT_DOUBLE_EQ(cosine_similarity(z, z, labels_of(z), Region::Fluid), 1.0);
}

TEST(Linreg, ExactFitsAndDegenerateInputs) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> x(50), y(50);
    for (auto& v : x) v = dist(rng);

    y = x;
    auto r = linreg(x, y);
    EXPECT_DOUBLE_EQ(r.k, 1.0);
    EXPECT_NEAR(r.intercept, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.r2, 1.0);

    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.0 * x[i];
    r = linreg(x, y);
    EXPECT_DOUBLE_EQ(r.k, 2.0);
    EXPECT_DOUBLE_EQ(r.r2, 1.0);

    EXPECT_THROW(linreg({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(linreg({1.0}, {2.0}), std::invalid_argument);
    EXPECT_THROW(linreg({1.0, 2.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(Linreg, MonteCarloNoiseStaysNearIdentity) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> signal(0.0, 1.0), noise(0.0, 0.01);
    const std::size_t n = 10000;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = signal(rng);
        y[i] = x[i] + noise(rng);
    }
    const auto r = linreg(x, y);
    EXPECT_LT(std::abs(r.k - 1.0), 0.01);
    EXPECT_LT(std::abs(r.intercept), 0.01);
    EXPECT_GT(r.r2, 0.99);
}

TEST(Linreg, GuardedHandlesConstantTruth) {
    // exact agreement on a constant maps to the ideal fit
    auto r = linreg_guarded({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5});
    EXPECT_DOUBLE_EQ(r.k, 1.0);
    EXPECT_DOUBLE_EQ(r.intercept, 0.0);
    EXPECT_DOUBLE_EQ(r.r2, 1.0);

    // disagreement on a constant maps to a flat fit at the prediction mean
    r = linreg_guarded({0.5, 0.5}, {1.0, 3.0});
    EXPECT_DOUBLE_EQ(r.k, 0.0);
    EXPECT_DOUBLE_EQ(r.intercept, 2.0);
    EXPECT_DOUBLE_EQ(r.r2, 0.0);

    // varying truth delegates to the plain regression
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{0.1, 1.2, 1.9, 3.1};
    const auto a = linreg_guarded(x, y), b = linreg(x, y);
    EXPECT_DOUBLE_EQ(a.k, b.k);
    EXPECT_DOUBLE_EQ(a.intercept, b.intercept);
    EXPECT_DOUBLE_EQ(a.r2, b.r2);

    EXPECT_THROW(linreg_guarded({}, {}), std::invalid_argument);
}

TEST(PeakFrame, PicksTheStrongestSynthesizedFrame) {
    VelocityField4D f = make_field(2, 2, 2, 8);
    const double speeds[8] = {9.0, 1.0, 9.5, 2.0, 0.5, 7.0, 0.2, 3.0};
    for (std::size_t t = 0; t < 8; ++t)
        for (std::size_t p = 0; p < 8; ++p) vat(f, 0, t, p) = static_cast<float>(speeds[t]);
    // even frames 0 and 2 are larger but only odd (synthesized) frames compete
    EXPECT_EQ(peak_synthesized_frame(f), 5u);

    // speed, not signed velocity
    for (std::size_t p = 0; p < 8; ++p) vat(f, 0, 1, p) = -10.0f;
    EXPECT_EQ(peak_synthesized_frame(f), 1u);

    VelocityField4D empty = make_field(2, 2, 2, 8);
    for (auto& m : empty.fluid_mask) m = 0;
    EXPECT_THROW(peak_synthesized_frame(empty), std::invalid_argument);
    EXPECT_THROW(peak_synthesized_frame(make_field(2, 2, 2, 1)), std::invalid_argument);
}

TEST(CompareMethods, PerfectMethodProducesIdealRows) {
    const VelocityField4D truth = tube_field(4, 160.0);

    // the tube mask must populate all three regions or the report is vacuous
    const auto labels = labels_of(truth);
    std::size_t core = 0, boundary = 0, nonfluid = 0;
    for (auto l : labels.labels) {
        if (l == static_cast<std::uint8_t>(RegionLabel::FluidCore)) ++core;
        if (l == static_cast<std::uint8_t>(RegionLabel::FluidBoundary)) ++boundary;
        if (l == static_cast<std::uint8_t>(RegionLabel::NonFluid)) ++nonfluid;
    }
    ASSERT_GT(core, 0u);
    ASSERT_GT(boundary, 0u);
    ASSERT_GT(nonfluid, 0u);

    VelocityField4D halved = truth;
    for (auto& x : halved.v) x *= 0.5f;
    VelocityField4D offset = truth;
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t p = 0; p < truth.grid.voxels(); ++p) vat(offset, 0, t, p) += 0.1f;

    const auto report = compare_methods(truth, {{"sr", &truth}, {"half", &halved}, {"off", &offset}});

    // 2 scopes x 3 regions x 3 methods x 3 components
    ASSERT_EQ(report.rows.size(), 54u);
    EXPECT_EQ(report.kr2_series.size(), 4u * 3u);
    EXPECT_EQ(report.methods, (std::vector<std::string>{"sr", "half", "off"}));
    EXPECT_EQ(report.peak_frame, 1u);  // frame 1 sits closest to the systolic peak

    // row order: scope, then region, then method, then component
    EXPECT_EQ(report.rows[0].scope, "all_frames");
    EXPECT_EQ(report.rows[0].region, "fluid");
    EXPECT_EQ(report.rows[0].method, "sr");
    EXPECT_EQ(report.rows[0].component, "vx");
    EXPECT_EQ(report.rows[2].component, "vz");
    EXPECT_EQ(report.rows[3].method, "half");
    EXPECT_EQ(report.rows[9].region, "boundary");
    EXPECT_EQ(report.rows[18].region, "nonfluid");
    EXPECT_EQ(report.rows[27].scope, "peak_frame");

    for (const auto& r : report.rows) {
        if (r.method != "sr") continue;
        EXPECT_DOUBLE_EQ(r.rmse, 0.0);
        EXPECT_DOUBLE_EQ(r.mae, 0.0);
        EXPECT_DOUBLE_EQ(r.mre_pct, 0.0);
        EXPECT_DOUBLE_EQ(r.k, 1.0);
        EXPECT_DOUBLE_EQ(r.abs_one_minus_k, 0.0);
        EXPECT_DOUBLE_EQ(r.intercept, 0.0);
        EXPECT_DOUBLE_EQ(r.r2, 1.0);
        // the eps floor in the denominator costs ~1e-12/|v|^2 on slow voxels
        EXPECT_NEAR(r.cosine_sim, 1.0, 1e-6);
    }

    // halving the field halves the regression slope on the flowing component
    const auto& half_vz = report.rows[5];
    EXPECT_EQ(half_vz.method, "half");
    EXPECT_EQ(half_vz.component, "vz");
    EXPECT_DOUBLE_EQ(half_vz.k, 0.5);
    EXPECT_DOUBLE_EQ(half_vz.abs_one_minus_k, 0.5);
    EXPECT_DOUBLE_EQ(half_vz.r2, 1.0);

    // constant-zero truth with a biased prediction falls back to the flat fit
    const auto& off_vx = report.rows[6];
    EXPECT_EQ(off_vx.method, "off");
    EXPECT_EQ(off_vx.component, "vx");
    EXPECT_DOUBLE_EQ(off_vx.k, 0.0);
    EXPECT_DOUBLE_EQ(off_vx.r2, 0.0);
    EXPECT_NEAR(off_vx.intercept, 0.1, 1e-6);
    EXPECT_NEAR(off_vx.rmse, 0.1, 1e-6);
    EXPECT_NEAR(off_vx.mae, 0.1, 1e-6);

    // a nonzero prediction over zero truth saturates the relative error at 100%
    const auto& off_nonfluid = report.rows[24];
    EXPECT_EQ(off_nonfluid.method, "off");
    EXPECT_EQ(off_nonfluid.region, "nonfluid");
    EXPECT_DOUBLE_EQ(off_nonfluid.mre_pct, 100.0);

    // per-frame fluid series: frame-major, component-minor, methods in order
    EXPECT_EQ(report.kr2_series[0].frame, 0u);
    EXPECT_EQ(report.kr2_series[0].component, "vx");
    const auto& s = report.kr2_series[2];
    EXPECT_EQ(s.component, "vz");
    ASSERT_EQ(s.k.size(), 3u);
    EXPECT_DOUBLE_EQ(s.k[0], 1.0);
    EXPECT_DOUBLE_EQ(s.k[1], 0.5);
    EXPECT_DOUBLE_EQ(s.k[2], 1.0);
    EXPECT_DOUBLE_EQ(s.r2[0], 1.0);
}

TEST(CompareMethods, RejectsMismatchedInputs) {
    const VelocityField4D truth = tube_field(4, 160.0);
    const VelocityField4D other = tube_field(8, 80.0);
    EXPECT_THROW(compare_methods(truth, {{"m", &other}}), std::invalid_argument);
    EXPECT_THROW(compare_methods(truth, {{"m", nullptr}}), std::invalid_argument);
    EXPECT_THROW(compare_methods(truth, {}), std::invalid_argument);
}

TEST(CompareMethods, MetricsAreScaleInvariantWhereTheyShouldBe) {
    VelocityField4D truth = tube_field(4, 160.0);
    VelocityField4D pred = truth;
    std::mt19937 rng(55);
    std::uniform_real_distribution<float> dist(-0.05f, 0.05f);
    for (auto& x : pred.v) x += dist(rng);

    const auto base = compare_methods(truth, {{"m", &pred}});

    // scaling both fields by 4 (exact in binary) must not move the
    // dimensionless metrics, while RMSE/MAE/intercept scale along
    VelocityField4D truth4 = truth, pred4 = pred;
    for (auto& x : truth4.v) x *= 4.0f;
    for (auto& x : pred4.v) x *= 4.0f;
    const auto scaled = compare_methods(truth4, {{"m", &pred4}});

    ASSERT_EQ(scaled.rows.size(), base.rows.size());
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
        const auto& a = base.rows[i];
        const auto& b = scaled.rows[i];
        EXPECT_NEAR(b.k, a.k, 1e-12);
        EXPECT_NEAR(b.r2, a.r2, 1e-12);
        EXPECT_NEAR(b.mre_pct, a.mre_pct, 1e-9);
        EXPECT_NEAR(b.cosine_sim, a.cosine_sim, 1e-9);
        EXPECT_NEAR(b.rmse, 4.0 * a.rmse, 1e-9);
        EXPECT_NEAR(b.mae, 4.0 * a.mae, 1e-9);
        EXPECT_NEAR(b.intercept, 4.0 * a.intercept, 1e-9);
    }
}

TEST(PlaneFlow, UniformFlowReproducesTheConstant) {
    VelocityField4D f = make_field(6, 6, 8, 3);
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t p = 0; p < f.grid.voxels(); ++p) {
            vat(f, 0, t, p) = 0.3f;
            vat(f, 2, t, p) = 0.7f;
        }
    const auto axial = plane_flow_curve(f, {2, 4, 4});
    ASSERT_EQ(axial.size(), 3u);
    for (double v : axial) EXPECT_DOUBLE_EQ(v, static_cast<double>(0.7f));
    const auto lateral = plane_flow_curve(f, {0, 3, 2});
    for (double v : lateral) EXPECT_DOUBLE_EQ(v, static_cast<double>(0.3f));

    const VelocityField4D z = make_field(4, 4, 4, 2);
    for (double v : plane_flow_curve(z, {2, 2, 2})) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(PlaneFlow, TubeCurveFollowsTheWaveform) {
    // frames land on exact multiples of 80 ms; put the systolic peak on frame 2
    const VelocityField4D f = tube_field(8, 80.0, 160.0);
    const auto curve = plane_flow_curve(f, {2, 4, 4});
    ASSERT_EQ(curve.size(), 8u);

    WaveformSpec w;
    w.t_systole = 160.0;
    std::size_t argmax = 0;
    for (std::size_t t = 1; t < 8; ++t)
        if (curve[t] > curve[argmax]) argmax = t;
    EXPECT_EQ(argmax, 2u);
    for (std::size_t t = 0; t < 8; ++t) {
        const double want = waveform_value(w, 80.0 * static_cast<double>(t)) / waveform_value(w, 160.0);
        EXPECT_NEAR(curve[t] / curve[2], want, 2e-5);
    }
}

TEST(PlaneFlow, RejectsBadPlanes) {
    VelocityField4D f = make_field(6, 6, 8, 2);
    for (std::size_t p = 0; p < f.grid.voxels(); ++p)
        f.fluid_mask[p] = (p % 8) >= 4 ? 1 : 0;  // fluid only in the upper z half
    EXPECT_THROW(plane_flow_curve(f, {2, 0, 2}), std::invalid_argument);
    EXPECT_THROW(plane_flow_curve(f, {3, 0, 4}), std::invalid_argument);
    EXPECT_THROW(plane_flow_curve(f, {2, 8, 4}), std::invalid_argument);
    EXPECT_THROW(plane_flow_curve(f, {2, 4, 0}), std::invalid_argument);
}

TEST(Csv, WritersEmitGoldenRows) {
    const auto dir = std::filesystem::temp_directory_path() / "tempoflow-evalcsv";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    MetricsReport report;
    report.methods = {"a", "b"};
    MetricsRow row;
    row.scope = "all_frames";
    row.region = "fluid";
    row.method = "a";
    row.component = "vx";
    row.rmse = 0.125;
    row.mae = 0.0625;
    row.mre_pct = 12.5;
    row.k = 1.0;
    row.abs_one_minus_k = 0.0;
    row.intercept = -0.5;
    row.r2 = 0.996;
    row.cosine_sim = 0.75;
    report.rows.push_back(row);
    KR2Sample sample;
    sample.frame = 3;
    sample.component = "vy";
    sample.k = {1.5, 0.25};
    sample.r2 = {1.0, 0.5};
    report.kr2_series.push_back(sample);

    write_table2_csv(report, (dir / "table2.csv").string());
    auto lines = read_lines(dir / "table2.csv");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0],
              "scope,region,method,component,rmse,mae,mre_pct,k,abs_one_minus_k,intercept,r2,cosine_sim");
    EXPECT_EQ(lines[1], "all_frames,fluid,a,vx,0.125,0.0625,12.5,1,0,-0.5,0.996,0.75");

    write_kr2_csv(report, (dir / "kr2.csv").string());
    lines = read_lines(dir / "kr2.csv");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "frame,component,k_a,r2_a,k_b,r2_b");
    EXPECT_EQ(lines[1], "3,vy,1.5,1,0.25,0.5");

    write_plane_flow_csv({{"truth", {0.5, 1.0}}, {"sr", {0.25, 0.0}}}, (dir / "pf.csv").string());
    lines = read_lines(dir / "pf.csv");
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "frame,truth,sr");
    EXPECT_EQ(lines[1], "0,0.5,0.25");
    EXPECT_EQ(lines[2], "1,1,0");

    EXPECT_THROW(write_plane_flow_csv({{"a", {1.0}}, {"b", {1.0, 2.0}}}, (dir / "x.csv").string()),
                 std::invalid_argument);
    EXPECT_THROW(write_plane_flow_csv({}, (dir / "x.csv").string()), std::invalid_argument);
    EXPECT_THROW(write_table2_csv(report, (dir / "no-such-dir" / "t.csv").string()),
                 std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST(Gather, PairsComponentSamplesInRegion) {
    VelocityField4D truth = make_field(2, 1, 1, 2);
    truth.fluid_mask[1] = 0;
    VelocityField4D pred = truth;
    vat(truth, 2, 0, 0) = 7.0f;
    vat(truth, 2, 1, 0) = 9.0f;
    vat(pred, 2, 0, 0) = 1.0f;
    vat(pred, 2, 1, 0) = 2.0f;
    std::vector<double> x, y;
    gather_component(truth, pred, labels_of(truth), Region::Fluid, 2, {}, x, y);
    ASSERT_EQ(x.size(), 2u);
    EXPECT_DOUBLE_EQ(x[0], 7.0);
    EXPECT_DOUBLE_EQ(x[1], 9.0);
    EXPECT_DOUBLE_EQ(y[0], 1.0);
    EXPECT_DOUBLE_EQ(y[1], 2.0);
}

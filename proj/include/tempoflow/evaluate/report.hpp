#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tempoflow/evaluate/metrics.hpp"

namespace tempoflow {

struct MetricsRow {
    std::string scope;   ///< "all_frames" or "peak_frame"
    std::string region;
    std::string method;
    std::string component;  ///< "vx", "vy", "vz"
    double rmse = 0.0;
    double mae = 0.0;
    double mre_pct = 0.0;   ///< vector metric, repeated across component rows
    double k = 0.0;
    double abs_one_minus_k = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double cosine_sim = 0.0;  ///< vector metric, repeated across component rows
};

struct KR2Sample {
    std::size_t frame = 0;
    std::string component;
    std::vector<double> k;   ///< per method, in method order
    std::vector<double> r2;
};

struct MetricsReport {
    std::vector<std::string> methods;
    std::vector<MetricsRow> rows;
    std::vector<KR2Sample> kr2_series;
    std::size_t peak_frame = 0;
};

namespace detail {

inline std::string fmt6(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

} // namespace detail

/// Table-II-shaped comparison of super-resolved and baseline fields against
/// the HR ground truth: per region x method x component metrics over all
/// frames and over the peak synthesized frame, plus per-frame k/R2 series.
inline MetricsReport compare_methods(
    const VelocityField4D& hr_truth,
    const std::vector<std::pair<std::string, const VelocityField4D*>>& methods) {
    hr_truth.validate();
    require(!methods.empty(), "compare_methods: no methods given");
    for (const auto& [name, f] : methods) {
        require(f != nullptr, "compare_methods: null field for " + name);
        require(f->grid == hr_truth.grid, "compare_methods: grid mismatch for " + name);
    }

    const RegionLabels labels = classify_regions(hr_truth.fluid_mask);
    const char* comp_names[3] = {"vx", "vy", "vz"};
    const Region regions[3] = {Region::Fluid, Region::Boundary, Region::NonFluid};

    MetricsReport report;
    for (const auto& [name, f] : methods) report.methods.push_back(name);
    report.peak_frame = peak_synthesized_frame(hr_truth);

    const std::vector<std::size_t> all_frames;  // empty = every frame
    const std::vector<std::size_t> peak{report.peak_frame};
    const std::pair<std::string, const std::vector<std::size_t>*> scopes[2] = {
        {"all_frames", &all_frames}, {"peak_frame", &peak}};

    std::vector<double> xs, ys;
    for (const auto& [scope, frames] : scopes)
        for (Region region : regions)
            for (const auto& [name, f] : methods) {
                const double mre = 100.0 * relative_error_tanh(hr_truth, *f, labels, region, *frames);
                const double cos = cosine_similarity(hr_truth, *f, labels, region, *frames);
                for (std::size_t c = 0; c < 3; ++c) {
                    MetricsRow row;
                    row.scope = scope;
                    row.region = region_name(region);
                    row.method = name;
                    row.component = comp_names[c];
                    const BasicErrors be = basic_errors(hr_truth, *f, labels, region, c, *frames);
                    row.rmse = be.rmse;
                    row.mae = be.mae;
                    row.mre_pct = mre;
                    row.cosine_sim = cos;
                    gather_component(hr_truth, *f, labels, region, c, *frames, xs, ys);
                    const LinregResult lr = linreg_guarded(xs, ys);
                    row.k = lr.k;
                    row.abs_one_minus_k = std::abs(1.0 - lr.k);
                    row.intercept = lr.intercept;
                    row.r2 = lr.r2;
                    report.rows.push_back(row);
                }
            }

    // per-frame fluid-region regression series (Fig. 4C shape)
    for (std::size_t t = 0; t < hr_truth.grid.nt; ++t) {
        const std::vector<std::size_t> frame{t};
        for (std::size_t c = 0; c < 3; ++c) {
            KR2Sample s;
            s.frame = t;
            s.component = comp_names[c];
            for (const auto& [name, f] : methods) {
                gather_component(hr_truth, *f, labels, Region::Fluid, c, frame, xs, ys);
                const LinregResult lr = linreg_guarded(xs, ys);
                s.k.push_back(lr.k);
                s.r2.push_back(lr.r2);
            }
            report.kr2_series.push_back(s);
        }
    }
    return report;
}

inline void write_table2_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream os(path);
    require(os.good(), "write_table2_csv: cannot open " + path);
    os << "scope,region,method,component,rmse,mae,mre_pct,k,abs_one_minus_k,intercept,r2,cosine_sim\n";
    for (const auto& r : report.rows)
        os << r.scope << ',' << r.region << ',' << r.method << ',' << r.component << ','
           << detail::fmt6(r.rmse) << ',' << detail::fmt6(r.mae) << ',' << detail::fmt6(r.mre_pct)
           << ',' << detail::fmt6(r.k) << ',' << detail::fmt6(r.abs_one_minus_k) << ','
           << detail::fmt6(r.intercept) << ',' << detail::fmt6(r.r2) << ','
           << detail::fmt6(r.cosine_sim) << '\n';
    require(os.good(), "write_table2_csv: write failed for " + path);
}

inline void write_kr2_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream os(path);
    require(os.good(), "write_kr2_csv: cannot open " + path);
    os << "frame,component";
    for (const auto& m : report.methods) os << ",k_" << m << ",r2_" << m;
    os << '\n';
    for (const auto& s : report.kr2_series) {
        os << s.frame << ',' << s.component;
        for (std::size_t i = 0; i < s.k.size(); ++i)
            os << ',' << detail::fmt6(s.k[i]) << ',' << detail::fmt6(s.r2[i]);
        os << '\n';
    }
    require(os.good(), "write_kr2_csv: write failed for " + path);
}

/// plane_flow.csv: one row per frame, one mean-velocity column per field.
inline void write_plane_flow_csv(const std::vector<std::pair<std::string, std::vector<double>>>& curves,
                                 const std::string& path) {
    require(!curves.empty(), "write_plane_flow_csv: no curves");
    const std::size_t nt = curves.front().second.size();
    for (const auto& [name, c] : curves)
        require(c.size() == nt, "write_plane_flow_csv: curve length mismatch for " + name);
    std::ofstream os(path);
    require(os.good(), "write_plane_flow_csv: cannot open " + path);
    os << "frame";
    for (const auto& [name, c] : curves) os << ',' << name;
    os << '\n';
    for (std::size_t t = 0; t < nt; ++t) {
        os << t;
        for (const auto& [name, c] : curves) os << ',' << detail::fmt6(c[t]);
        os << '\n';
    }
    require(os.good(), "write_plane_flow_csv: write failed for " + path);
}

} // namespace tempoflow

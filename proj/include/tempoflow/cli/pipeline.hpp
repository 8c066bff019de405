#pragma once

#include <filesystem>
#include <iostream>
#include <vector>

#include "tempoflow/baselines/interp.hpp"
#include "tempoflow/cli/config.hpp"
#include "tempoflow/core/container.hpp"
#include "tempoflow/csrecon/fista.hpp"
#include "tempoflow/evaluate/report.hpp"
#include "tempoflow/mrsim/coils.hpp"
#include "tempoflow/patch/dataset.hpp"
#include "tempoflow/patch/stitch.hpp"
#include "tempoflow/srnet/infer.hpp"
#include "tempoflow/srnet/train.hpp"

namespace tempoflow::cli {

constexpr const char* kTempoflowVersion = "0.3.0";

namespace fs = std::filesystem;

struct RunContext {
    Config cfg;
    fs::path out;
    std::string cfg_hash;
    std::string command;
};

inline RunContext make_context(Config cfg, const std::string& command,
                               const std::string& out_override = "") {
    RunContext rc;
    rc.out = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
    rc.cfg_hash = config_hash(cfg);
    rc.command = command;
    rc.cfg = std::move(cfg);
    return rc;
}

inline json provenance_meta(const RunContext& rc) {
    json j;
    j["command"] = rc.command;
    j["config_hash"] = rc.cfg_hash;
    j["seed"] = rc.cfg.seed;
    j["versions"] = {{"tempoflow", kTempoflowVersion}, {"fftw", std::string(fftw_version)}};
    return j;
}

inline void print_provenance(const RunContext& rc) {
    std::cout << "[tempoflow] command=" << rc.command << " config=" << rc.cfg_hash
              << " seed=" << rc.cfg.seed << " versions=tempoflow/" << kTempoflowVersion << ",fftw/"
              << fftw_version << "\n";
}

/// A seed value derived deterministically from (seed, tag, index); used to key
/// per-phantom noise, patch extraction and augmentation streams.
inline std::uint64_t derived_seed(std::uint64_t seed, const char* tag, std::uint64_t index) {
    auto rng = substream(seed, tag, index);
    return rng();
}

// ---------------------------------------------------------------------------
// container glue

inline f4d::Container kspace_to_container(const MultiCoilKSpace& ks) {
    f4d::Container c;
    c.add("kspace", ks.data);
    c.add("sampling_masks", ks.pattern.masks);
    c.meta["mean_fluid_signal"] = ks.mean_fluid_signal;
    c.meta["acquisition"] = {{"venc", ks.config.venc},
                             {"snr_db_low", ks.config.snr_db_low},
                             {"snr_db_high", ks.config.snr_db_high},
                             {"n_coils_total", ks.config.n_coils_total},
                             {"n_coils_active", ks.config.n_coils_active},
                             {"acceleration", ks.config.acceleration},
                             {"seed", ks.config.seed}};
    return c;
}

inline MultiCoilKSpace kspace_from_container(const f4d::Container& c) {
    MultiCoilKSpace ks;
    ks.data = c.get<std::complex<float>>("kspace");
    ks.pattern.masks = c.get<std::uint8_t>("sampling_masks");
    const auto& a = c.meta.at("acquisition");
    ks.config.venc = a.at("venc").get<double>();
    ks.config.snr_db_low = a.at("snr_db_low").get<double>();
    ks.config.snr_db_high = a.at("snr_db_high").get<double>();
    ks.config.n_coils_total = a.at("n_coils_total").get<std::size_t>();
    ks.config.n_coils_active = a.at("n_coils_active").get<std::size_t>();
    ks.config.acceleration = a.at("acceleration").get<double>();
    ks.config.seed = a.at("seed").get<std::uint64_t>();
    ks.mean_fluid_signal = c.meta.at("mean_fluid_signal").get<double>();
    return ks;
}

inline void save_with_provenance(f4d::Container c, const RunContext& rc, const fs::path& dir) {
    c.meta["provenance"] = provenance_meta(rc);
    f4d::save(c, dir);
}

inline VelocityField4D load_field(const fs::path& dir) {
    return field_from_container(f4d::load(dir));
}

// ---------------------------------------------------------------------------
// shared stage helpers

inline CoilArray make_coils(const Config& cfg) {
    if (cfg.uniform_coil) {
        const Grid4D g = cfg.hr_grid();
        const std::size_t k = cfg.acquisition.n_coils_active;
        CoilArray coils;
        coils.maps = NdArray<std::complex<float>>({k, g.nx, g.ny, g.nz});
        const float level = static_cast<float>(1.0 / std::sqrt(static_cast<double>(k)));
        coils.maps.fill({level, 0.0f});
        return coils;
    }
    const CoilArray all =
        simulate_coil_maps(cfg.hr_grid(), cfg.acquisition.n_coils_total, cfg.coil_segments);
    return select_active_coils(all, cfg.acquisition.n_coils_active, cfg.seed);
}

inline SamplingPattern make_pattern(const Config& cfg) {
    return generate_phyllotaxis_pattern(cfg.grid.ny, cfg.grid.nz, cfg.frames.nt_hr,
                                        cfg.acquisition.acceleration);
}

/// Encode, add noise (unless disabled) and subsample one phantom's HR truth.
inline MultiCoilKSpace acquire_phantom(const Config& cfg, const VelocityField4D& hr,
                                       const CoilArray& coils, const SamplingPattern& pattern,
                                       std::size_t global_index) {
    AcquisitionConfig acq = cfg.acquisition;
    acq.seed = cfg.seed;
    MultiCoilKSpace ks = encode_to_kspace(hr, coils, acq);
    if (!cfg.disable_noise) {
        const double target_snr = draw_target_snr(acq, global_index);
        ks = add_noise(ks, target_snr, derived_seed(cfg.seed, "phantom-noise", global_index));
    }
    ks = sample_kspace(ks, pattern);
    return ks;
}

/// CS reconstruction of the frame-accumulated (LR) k-space.
inline VelocityField4D recon_lr_field(const Config& cfg, const MultiCoilKSpace& sampled,
                                      const CoilArray& coils,
                                      const NdArray<std::uint8_t>& fluid_mask) {
    const MultiCoilKSpace lr_ks = accumulate_kspace(sampled, 2);
    return reconstruct_field(lr_ks, coils, cfg.recon.fista, cfg.grid.dx, 2.0 * cfg.frames.dt_hr,
                             fluid_mask);
}

inline fs::path phantom_dir(const RunContext& rc, const PhantomEntry& e) {
    return rc.out / "phantoms" / e.name();
}
inline fs::path kspace_dir(const RunContext& rc, const PhantomEntry& e) {
    return rc.out / "kspace" / e.name();
}
inline fs::path field_dir(const RunContext& rc, const PhantomEntry& e, const std::string& kind) {
    return rc.out / "fields" / e.name() / kind;
}

// ---------------------------------------------------------------------------
// subcommands

inline void cmd_phantom(const RunContext& rc) {
    for (const auto& e : phantom_entries(rc.cfg)) {
        const auto [hr, lr] =
            evaluate_phantom_pair(*e.spec, rc.cfg.hr_grid(), rc.cfg.frames.nt_hr, rc.cfg.frames.dt_hr);
        auto annotate = [&](f4d::Container c, const char* res) {
            c.meta["phantom"] = detail::phantom_to_json(*e.spec);
            c.meta["role"] = e.role;
            c.meta["resolution"] = res;
            return c;
        };
        save_with_provenance(annotate(to_container(hr), "hr"), rc, phantom_dir(rc, e) / "hr");
        save_with_provenance(annotate(to_container(lr), "lr"), rc, phantom_dir(rc, e) / "lr");
    }
}

inline void cmd_acquire(const RunContext& rc) {
    const CoilArray coils = make_coils(rc.cfg);
    const SamplingPattern pattern = make_pattern(rc.cfg);
    for (const auto& e : phantom_entries(rc.cfg)) {
        const VelocityField4D hr = load_field(phantom_dir(rc, e) / "hr");
        const MultiCoilKSpace ks = acquire_phantom(rc.cfg, hr, coils, pattern, e.global_index);
        f4d::Container c = kspace_to_container(ks);
        c.meta["role"] = e.role;
        save_with_provenance(std::move(c), rc, kspace_dir(rc, e));
    }
}

inline void cmd_recon(const RunContext& rc) {
    const CoilArray coils = make_coils(rc.cfg);
    for (const auto& e : phantom_entries(rc.cfg)) {
        const MultiCoilKSpace ks = kspace_from_container(f4d::load(kspace_dir(rc, e)));
        const VelocityField4D lr_truth = load_field(phantom_dir(rc, e) / "lr");
        const VelocityField4D lr_input = recon_lr_field(rc.cfg, ks, coils, lr_truth.fluid_mask);
        save_with_provenance(to_container(lr_input), rc, field_dir(rc, e, "lr_input"));
        if (rc.cfg.recon.reconstruct_hr) {
            const VelocityField4D hr_recon =
                reconstruct_field(ks, coils, rc.cfg.recon.fista, rc.cfg.grid.dx,
                                  rc.cfg.frames.dt_hr, lr_truth.fluid_mask);
            save_with_provenance(to_container(hr_recon), rc, field_dir(rc, e, "hr_recon"));
        }
    }
}

/// Fused acquire+recon used by `pipeline`: k-space stays in memory unless
/// pipeline.save_kspace asks for it.
inline void run_acquire_recon(const RunContext& rc) {
    const CoilArray coils = make_coils(rc.cfg);
    const SamplingPattern pattern = make_pattern(rc.cfg);
    for (const auto& e : phantom_entries(rc.cfg)) {
        const VelocityField4D hr = load_field(phantom_dir(rc, e) / "hr");
        const MultiCoilKSpace ks = acquire_phantom(rc.cfg, hr, coils, pattern, e.global_index);
        if (rc.cfg.pipeline.save_kspace) {
            f4d::Container c = kspace_to_container(ks);
            c.meta["role"] = e.role;
            save_with_provenance(std::move(c), rc, kspace_dir(rc, e));
        }
        const VelocityField4D lr_input = recon_lr_field(rc.cfg, ks, coils, hr.fluid_mask);
        save_with_provenance(to_container(lr_input), rc, field_dir(rc, e, "lr_input"));
        if (rc.cfg.recon.reconstruct_hr) {
            const VelocityField4D hr_recon = reconstruct_field(
                ks, coils, rc.cfg.recon.fista, rc.cfg.grid.dx, rc.cfg.frames.dt_hr, hr.fluid_mask);
            save_with_provenance(to_container(hr_recon), rc, field_dir(rc, e, "hr_recon"));
        }
    }
}

inline void cmd_patches(const RunContext& rc) {
    std::vector<PatchPair> train_set, val_set, test_set;
    for (const auto& e : phantom_entries(rc.cfg)) {
        ExtractConfig ecfg = rc.cfg.patches.extract;
        if (e.role == "validation") ecfg.n_patches = rc.cfg.patches.n_val_patches;
        if (e.role == "test") ecfg.n_patches = rc.cfg.patches.n_test_patches;
        if (ecfg.n_patches == 0) continue;

        const VelocityField4D lr_input = load_field(field_dir(rc, e, "lr_input"));
        const VelocityField4D hr_truth = load_field(phantom_dir(rc, e) / "hr");
        std::vector<PatchPair> patches = extract_patch_pairs(
            lr_input, hr_truth, ecfg, derived_seed(rc.cfg.seed, "patch-phantom", e.global_index));
        if (e.role == "train" && rc.cfg.patches.augment_per_patch > 0)
            patches = augment_dataset(patches, rc.cfg.patches.augment_per_patch,
                                      derived_seed(rc.cfg.seed, "augment-phantom", e.global_index));
        auto& dst = e.role == "train" ? train_set : (e.role == "validation" ? val_set : test_set);
        for (auto& p : patches) dst.push_back(std::move(p));
    }
    auto save_set = [&](const std::vector<PatchPair>& set, const char* name) {
        if (set.empty()) return;
        f4d::Container c = patches_to_container(set);
        c.meta["split"] = name;
        save_with_provenance(std::move(c), rc, rc.out / "patches" / name);
    };
    save_set(train_set, "train");
    save_set(val_set, "validation");
    save_set(test_set, "test");
}

inline void cmd_train(const RunContext& rc) {
    const std::vector<PatchPair> train_set =
        patches_from_container(f4d::load(rc.out / "patches" / "train"));
    std::vector<PatchPair> val_set;
    if (fs::exists(rc.out / "patches" / "validation" / "manifest.json"))
        val_set = patches_from_container(f4d::load(rc.out / "patches" / "validation"));

    const TrainResult result = train(train_set, val_set, rc.cfg.network, rc.cfg.loss,
                                     rc.cfg.training, rc.cfg.seed, &std::cerr);

    auto annotate = [&](f4d::Container c, const char* which) {
        c.meta["checkpoint"] = which;
        c.meta["best_epoch"] = result.best_epoch;
        c.meta["best_val"] = result.best_val;
        return c;
    };
    save_with_provenance(annotate(params_to_container(result.params), "best"), rc,
                         rc.out / "model" / "best");
    save_with_provenance(annotate(params_to_container(result.final_params), "final"), rc,
                         rc.out / "model" / "final");
    fs::create_directories(rc.out / "reports");
    write_loss_curve_csv(result.curve, (rc.out / "reports" / "loss_curve.csv").string());
}

inline void cmd_infer(const RunContext& rc) {
    const NetworkParams params = params_from_container(f4d::load(rc.out / "model" / "best"));
    for (const auto& e : phantom_entries(rc.cfg)) {
        if (e.role != "test") continue;
        const VelocityField4D lr_input = load_field(field_dir(rc, e, "lr_input"));
        const VelocityField4D sr = infer_field(params, lr_input);
        save_with_provenance(to_container(sr), rc, field_dir(rc, e, "sr"));
    }
}

inline void cmd_baseline(const RunContext& rc, const std::string& method) {
    require(method == "both" || method == "linear" || method == "sinc",
            "baseline: method must be linear, sinc or both");
    for (const auto& e : phantom_entries(rc.cfg)) {
        if (e.role != "test") continue;
        const VelocityField4D lr_input = load_field(field_dir(rc, e, "lr_input"));
        if (method != "sinc")
            save_with_provenance(to_container(linear_interp_time(lr_input, 2)), rc,
                                 field_dir(rc, e, "linear"));
        if (method != "linear")
            save_with_provenance(to_container(sinc_interp_time(lr_input, 2)), rc,
                                 field_dir(rc, e, "sinc"));
    }
}

inline void cmd_evaluate(const RunContext& rc) {
    for (const auto& e : phantom_entries(rc.cfg)) {
        if (e.role != "test") continue;
        const VelocityField4D hr_truth = load_field(phantom_dir(rc, e) / "hr");
        const VelocityField4D lr_truth = load_field(phantom_dir(rc, e) / "lr");
        const VelocityField4D sr = load_field(field_dir(rc, e, "sr"));
        const VelocityField4D linear = load_field(field_dir(rc, e, "linear"));
        const VelocityField4D sinc = load_field(field_dir(rc, e, "sinc"));
        const VelocityField4D lr_input = load_field(field_dir(rc, e, "lr_input"));
        require(sr.grid == hr_truth.grid && linear.grid == hr_truth.grid &&
                    sinc.grid == hr_truth.grid,
                "evaluate: grid mismatch between HR truth and a method field");
        require(lr_input.grid == lr_truth.grid,
                "evaluate: grid mismatch between LR truth and the LR input field");

        MetricsReport report = compare_methods(
            hr_truth, {{"sr", &sr}, {"linear", &linear}, {"sinc", &sinc}});
        // LR input is scored against the LR truth frames it actually has
        const MetricsReport lr_report = compare_methods(lr_truth, {{"lr_input", &lr_input}});
        for (const auto& row : lr_report.rows)
            if (row.scope == "all_frames") report.rows.push_back(row);

        const fs::path dir = rc.out / "reports" / e.name();
        fs::create_directories(dir);
        write_table2_csv(report, (dir / "table2.csv").string());
        write_kr2_csv(report, (dir / "kr2_series.csv").string());

        std::vector<std::pair<std::string, std::vector<double>>> curves;
        curves.emplace_back("truth", plane_flow_curve(hr_truth, rc.cfg.evaluate.plane));
        curves.emplace_back("sr", plane_flow_curve(sr, rc.cfg.evaluate.plane));
        curves.emplace_back("linear", plane_flow_curve(linear, rc.cfg.evaluate.plane));
        curves.emplace_back("sinc", plane_flow_curve(sinc, rc.cfg.evaluate.plane));
        write_plane_flow_csv(curves, (dir / "plane_flow.csv").string());

        std::ofstream prov(dir / "provenance.json");
        require(prov.good(), "evaluate: cannot write provenance record");
        prov << provenance_meta(rc).dump(2) << "\n";
    }
}

inline void cmd_pipeline(const RunContext& rc) {
    cmd_phantom(rc);
    run_acquire_recon(rc);
    cmd_patches(rc);
    cmd_train(rc);
    cmd_infer(rc);
    cmd_baseline(rc, "both");
    cmd_evaluate(rc);
}

} // namespace tempoflow::cli

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tempoflow/csrecon/fista.hpp"
#include "tempoflow/evaluate/metrics.hpp"
#include "tempoflow/mrsim/encode.hpp"
#include "tempoflow/patch/patch.hpp"
#include "tempoflow/phantom/phantom.hpp"
#include "tempoflow/srnet/adam.hpp"
#include "tempoflow/srnet/loss.hpp"
#include "tempoflow/srnet/network.hpp"

namespace tempoflow::cli {

using nlohmann::json;

/// Config parsing failures carry this type so main() can map them to exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpatialConfig {
    std::size_t nx = 48, ny = 48, nz = 24;
    double dx = 2.0;  ///< isotropic spacing [mm]
};

struct FrameConfig {
    std::size_t nt_hr = 32;
    double dt_hr = 20.0;  ///< HR frame spacing [ms]; LR is nt_hr/2 at 2*dt_hr
};

struct ReconConfig {
    FistaConfig fista;
    bool reconstruct_hr = false;  ///< also reconstruct the non-accumulated HR k-space
};

struct PatchSetConfig {
    ExtractConfig extract;             ///< per training phantom
    std::size_t n_val_patches = 128;   ///< per validation phantom
    std::size_t n_test_patches = 128;  ///< per test phantom
    std::size_t augment_per_patch = 1; ///< extra augmented copies, training set only
};

struct EvalConfig {
    PlaneSpec plane{2, 12, 4};
};

struct PipelineRunConfig {
    bool save_kspace = false;  ///< persist sampled k-space during `pipeline`
};

struct Config {
    SpatialConfig grid;
    FrameConfig frames;
    std::vector<PhantomSpec> train_phantoms;
    std::vector<PhantomSpec> validation_phantoms;
    std::vector<PhantomSpec> test_phantoms;
    AcquisitionConfig acquisition;
    int coil_segments = 64;
    bool disable_noise = false;  ///< skip the additive k-space noise stage
    bool uniform_coil = false;   ///< unit-sensitivity coils (identity-oracle mode)
    ReconConfig recon;
    PatchSetConfig patches;
    NetworkConfig network;
    LossConfig loss;
    AdamConfig training;
    EvalConfig evaluate;
    PipelineRunConfig pipeline;
    std::uint64_t seed = 7;
    std::string output_dir = "out";

    Grid4D hr_grid() const {
        return {grid.nx, grid.ny, grid.nz, frames.nt_hr, grid.dx, frames.dt_hr};
    }
    Grid4D lr_grid() const {
        return {grid.nx, grid.ny, grid.nz, frames.nt_hr / 2, grid.dx, 2.0 * frames.dt_hr};
    }

    void validate() const {
        hr_grid().validate();
        require(frames.nt_hr % 2 == 0 && frames.nt_hr >= 2, "config: nt_hr must be even");
        require(!train_phantoms.empty(), "config: need at least one training phantom");
        require(!test_phantoms.empty(), "config: need at least one test phantom");
        auto check_period = [&](const PhantomSpec& p) {
            const WaveformSpec& w =
                p.kind == PhantomSpec::Kind::Tube ? p.tube.waveform : p.vortex.waveform;
            w.validate();
            require(std::abs(static_cast<double>(frames.nt_hr) * frames.dt_hr - w.period) <
                        1e-9 * w.period,
                    "config: waveform period must equal nt_hr * dt_hr");
        };
        for (const auto& p : train_phantoms) check_period(p);
        for (const auto& p : validation_phantoms) check_period(p);
        for (const auto& p : test_phantoms) check_period(p);
        acquisition.validate();
        require(coil_segments >= 3, "config: coil_segments must be >= 3");
        recon.fista.validate();
        network.validate();
        loss.validate();
        require(training.batch_size >= 1 && training.epochs >= 1, "config: bad training section");
        require(evaluate.plane.axis < 3, "config: plane axis must be 0..2");
    }
};

/// One phantom with its role in the experiment; global_index keys the
/// per-phantom random substreams (SNR draw, noise, patch extraction).
struct PhantomEntry {
    std::string role;  // "train" | "validation" | "test"
    std::size_t index_in_role;
    std::size_t global_index;
    const PhantomSpec* spec;

    std::string name() const { return role + "_" + std::to_string(index_in_role); }
};

inline std::vector<PhantomEntry> phantom_entries(const Config& cfg) {
    std::vector<PhantomEntry> out;
    std::size_t g = 0;
    for (std::size_t i = 0; i < cfg.train_phantoms.size(); ++i)
        out.push_back({"train", i, g++, &cfg.train_phantoms[i]});
    for (std::size_t i = 0; i < cfg.validation_phantoms.size(); ++i)
        out.push_back({"validation", i, g++, &cfg.validation_phantoms[i]});
    for (std::size_t i = 0; i < cfg.test_phantoms.size(); ++i)
        out.push_back({"test", i, g++, &cfg.test_phantoms[i]});
    return out;
}

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw ConfigError("config: " + what); }

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline WaveformSpec parse_waveform(const json& j, const WaveformSpec& base) {
    check_keys(j, "waveform", {"t_systole", "sigma_systole", "a_systole", "t_diastole",
                               "sigma_diastole", "a_diastole", "period"});
    WaveformSpec w = base;
    w.t_systole = get_or(j, "t_systole", w.t_systole);
    w.sigma_systole = get_or(j, "sigma_systole", w.sigma_systole);
    w.a_systole = get_or(j, "a_systole", w.a_systole);
    w.t_diastole = get_or(j, "t_diastole", w.t_diastole);
    w.sigma_diastole = get_or(j, "sigma_diastole", w.sigma_diastole);
    w.a_diastole = get_or(j, "a_diastole", w.a_diastole);
    w.period = get_or(j, "period", w.period);
    return w;
}

inline MagnitudeContrast parse_magnitude(const json& j, const MagnitudeContrast& base) {
    check_keys(j, "magnitude", {"fluid_level", "tissue_level"});
    MagnitudeContrast m = base;
    m.fluid_level = get_or(j, "fluid_level", m.fluid_level);
    m.tissue_level = get_or(j, "tissue_level", m.tissue_level);
    return m;
}

inline PhantomSpec parse_phantom(const json& j) {
    if (!j.is_object() || !j.contains("kind")) fail("phantom entry needs a 'kind'");
    PhantomSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tube") {
        check_keys(j, "tube phantom", {"kind", "tube_axis", "tube_radius", "center", "waveform",
                                       "peak_velocity", "magnitude"});
        spec.kind = PhantomSpec::Kind::Tube;
        TubePhantomSpec& t = spec.tube;
        if (j.contains("tube_axis")) t.tube_axis = axis_from_string(j.at("tube_axis").get<std::string>());
        t.tube_radius = get_or(j, "tube_radius", t.tube_radius);
        t.center = get_or(j, "center", t.center);
        if (j.contains("waveform")) t.waveform = parse_waveform(j.at("waveform"), t.waveform);
        t.peak_velocity = get_or(j, "peak_velocity", t.peak_velocity);
        if (j.contains("magnitude")) t.magnitude = parse_magnitude(j.at("magnitude"), t.magnitude);
    } else if (kind == "vortex") {
        check_keys(j, "vortex phantom", {"kind", "sphere_radius", "rotation_axis", "waveform",
                                         "peak_velocity", "magnitude"});
        spec.kind = PhantomSpec::Kind::Vortex;
        VortexPhantomSpec& v = spec.vortex;
        v.sphere_radius = get_or(j, "sphere_radius", v.sphere_radius);
        v.rotation_axis = get_or(j, "rotation_axis", v.rotation_axis);
        if (j.contains("waveform")) v.waveform = parse_waveform(j.at("waveform"), v.waveform);
        v.peak_velocity = get_or(j, "peak_velocity", v.peak_velocity);
        if (j.contains("magnitude")) v.magnitude = parse_magnitude(j.at("magnitude"), v.magnitude);
    } else {
        fail("phantom kind must be 'tube' or 'vortex', got '" + kind + "'");
    }
    return spec;
}

inline json waveform_to_json(const WaveformSpec& w) {
    return {{"t_systole", w.t_systole},   {"sigma_systole", w.sigma_systole},
            {"a_systole", w.a_systole},   {"t_diastole", w.t_diastole},
            {"sigma_diastole", w.sigma_diastole}, {"a_diastole", w.a_diastole},
            {"period", w.period}};
}

inline json phantom_to_json(const PhantomSpec& spec) {
    json j;
    if (spec.kind == PhantomSpec::Kind::Tube) {
        const TubePhantomSpec& t = spec.tube;
        j["kind"] = "tube";
        j["tube_axis"] = std::string(1, "xyz"[static_cast<int>(t.tube_axis)]);
        j["tube_radius"] = t.tube_radius;
        j["center"] = t.center;
        j["waveform"] = waveform_to_json(t.waveform);
        j["peak_velocity"] = t.peak_velocity;
        j["magnitude"] = {{"fluid_level", t.magnitude.fluid_level},
                          {"tissue_level", t.magnitude.tissue_level}};
    } else {
        const VortexPhantomSpec& v = spec.vortex;
        j["kind"] = "vortex";
        j["sphere_radius"] = v.sphere_radius;
        j["rotation_axis"] = v.rotation_axis;
        j["waveform"] = waveform_to_json(v.waveform);
        j["peak_velocity"] = v.peak_velocity;
        j["magnitude"] = {{"fluid_level", v.magnitude.fluid_level},
                          {"tissue_level", v.magnitude.tissue_level}};
    }
    return j;
}

} // namespace detail

/// Stock desk-scale experiment: 3 training phantoms (two tubes, one vortex),
/// one validation tube, one test tube, all on a 48x48x24 grid at 32 HR frames.
inline Config default_config() {
    Config cfg;

    PhantomSpec t0;  // axial tube, centered
    t0.kind = PhantomSpec::Kind::Tube;
    t0.tube.tube_axis = Axis::Z;
    t0.tube.tube_radius = 16.0;
    t0.tube.peak_velocity = 1.0;

    PhantomSpec t1;  // narrow tube along x, offset, faster and earlier systole
    t1.kind = PhantomSpec::Kind::Tube;
    t1.tube.tube_axis = Axis::X;
    t1.tube.tube_radius = 12.0;
    t1.tube.center = {0.0, -6.0};
    t1.tube.peak_velocity = 1.2;
    t1.tube.waveform.t_systole = 140.0;
    t1.tube.waveform.t_diastole = 430.0;

    PhantomSpec v0;  // oblique vortex
    v0.kind = PhantomSpec::Kind::Vortex;
    v0.vortex.sphere_radius = 18.0;
    v0.vortex.peak_velocity = 0.9;

    PhantomSpec tv;  // validation tube along y
    tv.kind = PhantomSpec::Kind::Tube;
    tv.tube.tube_axis = Axis::Y;
    tv.tube.tube_radius = 14.0;
    tv.tube.center = {4.0, 0.0};
    tv.tube.peak_velocity = 1.1;

    PhantomSpec tt;  // held-out test tube, offset and late systole
    tt.kind = PhantomSpec::Kind::Tube;
    tt.tube.tube_axis = Axis::Z;
    tt.tube.tube_radius = 13.0;
    tt.tube.center = {-5.0, 3.0};
    tt.tube.peak_velocity = 1.0;
    tt.tube.waveform.t_systole = 160.0;

    cfg.train_phantoms = {t0, t1, v0};
    cfg.validation_phantoms = {tv};
    cfg.test_phantoms = {tt};
    return cfg;
}

inline Config parse_config(const json& j) {
    using namespace detail;
    check_keys(j, "config root",
               {"grid", "frames", "phantoms", "acquisition", "recon", "patches", "network", "loss",
                "training", "evaluate", "pipeline", "seed", "output_dir"});
    Config cfg = default_config();

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"nx", "ny", "nz", "dx"});
        cfg.grid.nx = get_or(g, "nx", cfg.grid.nx);
        cfg.grid.ny = get_or(g, "ny", cfg.grid.ny);
        cfg.grid.nz = get_or(g, "nz", cfg.grid.nz);
        cfg.grid.dx = get_or(g, "dx", cfg.grid.dx);
    }
    if (j.contains("frames")) {
        const json& f = j.at("frames");
        check_keys(f, "frames", {"nt_hr", "dt_hr"});
        cfg.frames.nt_hr = get_or(f, "nt_hr", cfg.frames.nt_hr);
        cfg.frames.dt_hr = get_or(f, "dt_hr", cfg.frames.dt_hr);
    }
    if (j.contains("phantoms")) {
        const json& p = j.at("phantoms");
        check_keys(p, "phantoms", {"train", "validation", "test"});
        auto parse_list = [&](const char* key, std::vector<PhantomSpec>& dst) {
            if (!p.contains(key)) return;
            if (!p.at(key).is_array()) fail(std::string("phantoms.") + key + " must be an array");
            dst.clear();
            for (const auto& entry : p.at(key)) dst.push_back(parse_phantom(entry));
        };
        parse_list("train", cfg.train_phantoms);
        parse_list("validation", cfg.validation_phantoms);
        parse_list("test", cfg.test_phantoms);
    }
    if (j.contains("acquisition")) {
        const json& a = j.at("acquisition");
        check_keys(a, "acquisition", {"venc", "snr_db_range", "snr_db_low", "snr_db_high",
                                      "n_coils_total", "n_coils_active", "acceleration",
                                      "coil_segments", "disable_noise", "uniform_coil"});
        cfg.acquisition.venc = get_or(a, "venc", cfg.acquisition.venc);
        if (a.contains("snr_db_range")) {
            const auto range = a.at("snr_db_range").get<std::array<double, 2>>();
            cfg.acquisition.snr_db_low = range[0];
            cfg.acquisition.snr_db_high = range[1];
        }
        cfg.acquisition.snr_db_low = get_or(a, "snr_db_low", cfg.acquisition.snr_db_low);
        cfg.acquisition.snr_db_high = get_or(a, "snr_db_high", cfg.acquisition.snr_db_high);
        cfg.acquisition.n_coils_total = get_or(a, "n_coils_total", cfg.acquisition.n_coils_total);
        cfg.acquisition.n_coils_active = get_or(a, "n_coils_active", cfg.acquisition.n_coils_active);
        cfg.acquisition.acceleration = get_or(a, "acceleration", cfg.acquisition.acceleration);
        cfg.coil_segments = get_or(a, "coil_segments", cfg.coil_segments);
        cfg.disable_noise = get_or(a, "disable_noise", cfg.disable_noise);
        cfg.uniform_coil = get_or(a, "uniform_coil", cfg.uniform_coil);
    }
    if (j.contains("recon")) {
        const json& r = j.at("recon");
        check_keys(r, "recon", {"lambda_cs", "n_iter", "step_size", "tolerance", "haar_levels",
                                "use_momentum", "reconstruct_hr"});
        cfg.recon.fista.lambda_cs = get_or(r, "lambda_cs", cfg.recon.fista.lambda_cs);
        cfg.recon.fista.n_iter = get_or(r, "n_iter", cfg.recon.fista.n_iter);
        cfg.recon.fista.step_size = get_or(r, "step_size", cfg.recon.fista.step_size);
        cfg.recon.fista.tolerance = get_or(r, "tolerance", cfg.recon.fista.tolerance);
        cfg.recon.fista.haar_levels = get_or(r, "haar_levels", cfg.recon.fista.haar_levels);
        cfg.recon.fista.use_momentum = get_or(r, "use_momentum", cfg.recon.fista.use_momentum);
        cfg.recon.reconstruct_hr = get_or(r, "reconstruct_hr", cfg.recon.reconstruct_hr);
    }
    if (j.contains("patches")) {
        const json& p = j.at("patches");
        check_keys(p, "patches", {"n_patches", "patches_per_iteration", "max_attempts",
                                  "n_val_patches", "n_test_patches", "augment_per_patch"});
        cfg.patches.extract.n_patches = get_or(p, "n_patches", cfg.patches.extract.n_patches);
        cfg.patches.extract.patches_per_iteration =
            get_or(p, "patches_per_iteration", cfg.patches.extract.patches_per_iteration);
        cfg.patches.extract.max_attempts = get_or(p, "max_attempts", cfg.patches.extract.max_attempts);
        cfg.patches.n_val_patches = get_or(p, "n_val_patches", cfg.patches.n_val_patches);
        cfg.patches.n_test_patches = get_or(p, "n_test_patches", cfg.patches.n_test_patches);
        cfg.patches.augment_per_patch = get_or(p, "augment_per_patch", cfg.patches.augment_per_patch);
    }
    if (j.contains("network")) {
        const json& n = j.at("network");
        check_keys(n, "network", {"filters", "n_res_lr", "n_res_hr", "leaky_slope"});
        cfg.network.filters = get_or(n, "filters", cfg.network.filters);
        cfg.network.n_res_lr = get_or(n, "n_res_lr", cfg.network.n_res_lr);
        cfg.network.n_res_hr = get_or(n, "n_res_hr", cfg.network.n_res_hr);
        cfg.network.leaky_slope = get_or(n, "leaky_slope", cfg.network.leaky_slope);
    }
    if (j.contains("loss")) {
        const json& l = j.at("loss");
        check_keys(l, "loss", {"alpha", "beta", "lambda_nn", "eps_dir"});
        cfg.loss.alpha = get_or(l, "alpha", cfg.loss.alpha);
        cfg.loss.beta = get_or(l, "beta", cfg.loss.beta);
        cfg.loss.lambda_nn = get_or(l, "lambda_nn", cfg.loss.lambda_nn);
        cfg.loss.eps_dir = get_or(l, "eps_dir", cfg.loss.eps_dir);
    }
    if (j.contains("training")) {
        const json& t = j.at("training");
        check_keys(t, "training", {"lr", "beta1", "beta2", "eps", "batch_size", "epochs"});
        cfg.training.lr = get_or(t, "lr", cfg.training.lr);
        cfg.training.beta1 = get_or(t, "beta1", cfg.training.beta1);
        cfg.training.beta2 = get_or(t, "beta2", cfg.training.beta2);
        cfg.training.eps = get_or(t, "eps", cfg.training.eps);
        cfg.training.batch_size = get_or(t, "batch_size", cfg.training.batch_size);
        cfg.training.epochs = get_or(t, "epochs", cfg.training.epochs);
    }
    if (j.contains("evaluate")) {
        const json& e = j.at("evaluate");
        check_keys(e, "evaluate", {"plane"});
        if (e.contains("plane")) {
            const json& pl = e.at("plane");
            check_keys(pl, "evaluate.plane", {"axis", "index", "thickness"});
            cfg.evaluate.plane.axis = get_or(pl, "axis", cfg.evaluate.plane.axis);
            cfg.evaluate.plane.index = get_or(pl, "index", cfg.evaluate.plane.index);
            cfg.evaluate.plane.thickness = get_or(pl, "thickness", cfg.evaluate.plane.thickness);
        }
    }
    if (j.contains("pipeline")) {
        const json& p = j.at("pipeline");
        check_keys(p, "pipeline", {"save_kspace"});
        cfg.pipeline.save_kspace = get_or(p, "save_kspace", cfg.pipeline.save_kspace);
    }
    cfg.seed = get_or(j, "seed", cfg.seed);
    cfg.output_dir = get_or(j, "output_dir", cfg.output_dir);

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        detail::fail(e.what());
    }
    return cfg;
}

/// Canonical (sorted-key) JSON form of a resolved config; hashing this gives
/// the provenance config hash, so defaulted and explicit settings agree.
inline json config_to_json(const Config& cfg) {
    json j;
    j["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"nz", cfg.grid.nz}, {"dx", cfg.grid.dx}};
    j["frames"] = {{"nt_hr", cfg.frames.nt_hr}, {"dt_hr", cfg.frames.dt_hr}};
    json train = json::array(), val = json::array(), test = json::array();
    for (const auto& p : cfg.train_phantoms) train.push_back(detail::phantom_to_json(p));
    for (const auto& p : cfg.validation_phantoms) val.push_back(detail::phantom_to_json(p));
    for (const auto& p : cfg.test_phantoms) test.push_back(detail::phantom_to_json(p));
    j["phantoms"] = {{"train", train}, {"validation", val}, {"test", test}};
    j["acquisition"] = {{"venc", cfg.acquisition.venc},
                        {"snr_db_low", cfg.acquisition.snr_db_low},
                        {"snr_db_high", cfg.acquisition.snr_db_high},
                        {"n_coils_total", cfg.acquisition.n_coils_total},
                        {"n_coils_active", cfg.acquisition.n_coils_active},
                        {"acceleration", cfg.acquisition.acceleration},
                        {"coil_segments", cfg.coil_segments},
                        {"disable_noise", cfg.disable_noise},
                        {"uniform_coil", cfg.uniform_coil}};
    j["recon"] = {{"lambda_cs", cfg.recon.fista.lambda_cs},
                  {"n_iter", cfg.recon.fista.n_iter},
                  {"step_size", cfg.recon.fista.step_size},
                  {"tolerance", cfg.recon.fista.tolerance},
                  {"haar_levels", cfg.recon.fista.haar_levels},
                  {"use_momentum", cfg.recon.fista.use_momentum},
                  {"reconstruct_hr", cfg.recon.reconstruct_hr}};
    j["patches"] = {{"n_patches", cfg.patches.extract.n_patches},
                    {"patches_per_iteration", cfg.patches.extract.patches_per_iteration},
                    {"max_attempts", cfg.patches.extract.max_attempts},
                    {"n_val_patches", cfg.patches.n_val_patches},
                    {"n_test_patches", cfg.patches.n_test_patches},
                    {"augment_per_patch", cfg.patches.augment_per_patch}};
    j["network"] = {{"filters", cfg.network.filters},
                    {"n_res_lr", cfg.network.n_res_lr},
                    {"n_res_hr", cfg.network.n_res_hr},
                    {"leaky_slope", cfg.network.leaky_slope}};
    j["loss"] = {{"alpha", cfg.loss.alpha},
                 {"beta", cfg.loss.beta},
                 {"lambda_nn", cfg.loss.lambda_nn},
                 {"eps_dir", cfg.loss.eps_dir}};
    j["training"] = {{"lr", cfg.training.lr},   {"beta1", cfg.training.beta1},
                     {"beta2", cfg.training.beta2}, {"eps", cfg.training.eps},
                     {"batch_size", cfg.training.batch_size}, {"epochs", cfg.training.epochs}};
    j["evaluate"] = {{"plane", {{"axis", cfg.evaluate.plane.axis},
                                {"index", cfg.evaluate.plane.index},
                                {"thickness", cfg.evaluate.plane.thickness}}}};
    j["pipeline"] = {{"save_kspace", cfg.pipeline.save_kspace}};
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    return j;
}

inline std::uint64_t fnv1a_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string config_hash(const Config& cfg) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(config_to_json(cfg).dump())));
    return buf;
}

/// Apply `--set dotted.path=value` overrides onto the raw JSON. The value is
/// parsed as JSON when possible and treated as a bare string otherwise.
inline void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        detail::fail("--set expects key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) detail::fail("empty path segment in --set " + assignment);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (!node->is_object() && !node->is_null()) detail::fail("--set path '" + path + "' crosses a non-object");
        start = dot + 1;
    }
}

/// Load a config file (or the built-in defaults when path is empty), apply
/// overrides, and parse. Throws ConfigError on any problem.
inline Config load_config(const std::string& path, const std::vector<std::string>& overrides,
                          std::optional<std::uint64_t> seed_override = {}) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in.good()) detail::fail("cannot open config file " + path);
        j = json::parse(in, nullptr, false);
        if (j.is_discarded()) detail::fail("config file " + path + " is not valid JSON");
    }
    for (const auto& o : overrides) apply_override(j, o);
    Config cfg = parse_config(j);
    if (seed_override) cfg.seed = *seed_override;
    return cfg;
}

} // namespace tempoflow::cli

#pragma once

#include <CLI11.hpp>

#include "tempoflow/cli/pipeline.hpp"

namespace tempoflow::cli {

/// Entry point shared by the tempoflow binary and the test harness. args is
/// argv without the program name. Exit codes: 0 success, 1 runtime failure,
/// 2 unknown subcommand / bad flags / config parse error.
inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"tempoflow - paired 4D flow dataset synthesis and temporal super-resolution"};
    app.require_subcommand(1);

    struct SubOptions {
        std::string config_path;
        std::string out_dir;
        std::vector<std::string> sets;
        std::optional<std::uint64_t> seed;
        unsigned threads = 0;
        std::string method = "both";
    };
    SubOptions opt;

    const std::vector<std::string> names = {"phantom", "acquire",  "recon",    "patches", "train",
                                            "infer",   "baseline", "evaluate", "pipeline"};
    std::string chosen;
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "JSON config file (defaults when omitted)");
        sub->add_option("--out", opt.out_dir, "output directory (overrides config output_dir)");
        sub->add_option("--set", opt.sets, "override a config leaf, e.g. --set recon.n_iter=40");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--threads", opt.threads, "worker cap (TEMPOFLOW_THREADS is the fallback)");
        if (name == "baseline")
            sub->add_option("--method", opt.method, "linear | sinc | both")->default_str("both");
        sub->callback([&chosen, name] { chosen = name; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (opt.threads >= 1) set_thread_count(opt.threads);
        const Config cfg = load_config(opt.config_path, opt.sets, opt.seed);
        const RunContext rc = make_context(cfg, chosen, opt.out_dir);
        print_provenance(rc);
        fs::create_directories(rc.out);
        {
            std::ofstream resolved(rc.out / "resolved_config.json");
            require(resolved.good(), "cannot write resolved_config.json");
            resolved << config_to_json(rc.cfg).dump(2) << "\n";
        }

        if (chosen == "phantom") cmd_phantom(rc);
        else if (chosen == "acquire") cmd_acquire(rc);
        else if (chosen == "recon") cmd_recon(rc);
        else if (chosen == "patches") cmd_patches(rc);
        else if (chosen == "train") cmd_train(rc);
        else if (chosen == "infer") cmd_infer(rc);
        else if (chosen == "baseline") cmd_baseline(rc, opt.method);
        else if (chosen == "evaluate") cmd_evaluate(rc);
        else if (chosen == "pipeline") cmd_pipeline(rc);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "tempoflow: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tempoflow: " << e.what() << "\n";
        return 1;
    }
}

} // namespace tempoflow::cli

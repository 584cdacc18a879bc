#include <qdforge/harness/experiment.hpp>
#include <qdforge/harness/summarize.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    using namespace qdforge;

    CLI::App app{"qdforge: quality-diversity experiments with learned behavior grids"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "run one experiment from a config file");
    std::string run_config;
    std::string run_out;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    std::size_t eval_workers = 1;
    run_cmd->add_option("-c,--config", run_config, "config file path")->required();
    run_cmd->add_option("-o,--out", run_out, "run directory (default: output root/<experiment>-<algorithm>-seed<seed>)");
    run_cmd->add_option("--seed", seed_override, "override the config seed")->each([&](const std::string&) { seed_given = true; });
    run_cmd->add_option("--eval-workers", eval_workers, "parallel evaluation workers (results are independent of this)");

    // validate-config
    auto* validate_cmd = app.add_subcommand("validate-config", "parse, validate and print the canonical config");
    std::string validate_config_path;
    validate_cmd->add_option("-c,--config", validate_config_path, "config file path")->required();

    // render
    auto* render_cmd = app.add_subcommand("render", "render an SVG from a run directory");
    std::string render_dir, render_what = "elite-grid", render_out;
    render_cmd->add_option("-d,--dir", render_dir, "run directory")->required();
    render_cmd->add_option("-w,--what", render_what, "elite-grid | decoded-centers");
    render_cmd->add_option("-o,--out", render_out, "output SVG path");

    // summarize
    auto* summarize_cmd = app.add_subcommand("summarize", "per-iteration quantiles across run directories");
    std::vector<std::string> summarize_dirs;
    std::string summarize_out;
    summarize_cmd->add_option("dirs", summarize_dirs, "run directories")->required();
    summarize_cmd->add_option("-o,--out", summarize_out, "output CSV path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            auto config = harness::load_config(run_config);
            if (seed_given)
                config.seed = seed_override;
            harness::RunOptions options;
            options.eval_workers = eval_workers;
            if (!run_out.empty())
                options.out_dir = run_out;
            if (config.algorithm == "map-elites")
                std::cerr << "note: algorithm=map-elites ignores the [model] section\n";
            auto artifacts = harness::run_experiment(config, options);
            const auto& last = artifacts.result.metrics.back();
            std::cout << "run complete: " << artifacts.dir.string() << "\n"
                      << "  iterations=" << last.iteration << " coverage=" << last.coverage
                      << " pqd=" << last.pqd << " archive=" << last.archive_size << "\n";
            return 0;
        }
        if (*validate_cmd) {
            auto config = harness::load_config(validate_config_path);
            std::cout << harness::canonical_config(config);
            return 0;
        }
        if (*render_cmd) {
            auto path = harness::render_artifact(render_dir, render_what,
                                                 render_out.empty() ? std::filesystem::path{} : std::filesystem::path(render_out));
            std::cout << "wrote " << path.string() << "\n";
            return 0;
        }
        if (*summarize_cmd) {
            std::vector<std::filesystem::path> dirs(summarize_dirs.begin(), summarize_dirs.end());
            auto csv = harness::summarize_runs(dirs);
            if (summarize_out.empty()) {
                std::cout << csv;
            }
            else {
                std::ofstream out(summarize_out);
                if (!out)
                    throw UsageError("cannot write '" + summarize_out + "'");
                out << csv;
                std::cout << "wrote " << summarize_out << "\n";
            }
            return 0;
        }
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// rktlab: run verification experiments from JSON configs.
//
//   rktlab run --config windows.json --out results/windows
//   rktlab suite --out results --quick
//   rktlab report --summary results/windows/summary.json

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "rktlab/experiments.hpp"

namespace ex = rktlab::experiments;

int main(int argc, char** argv) {
    CLI::App app{"rktlab: reverse Carleson and kernel-thesis verification experiments"};
    app.fallthrough();

    std::string config;
    std::string out = "rktlab_out";
    std::uint64_t seed = ex::kDefaultSeed;
    unsigned threads = 1;
    bool quick = false;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for random families (default 0xC0FFEE)");
    app.add_option("--out", out, "Output directory");
    app.add_option("--threads", threads, "Worker threads for grid sweeps")->check(CLI::Range(1u, 256u));
    app.add_flag("--quick", quick, "Reduced grids for CI");
    app.add_option("--config", config, "Experiment config (JSON)");

    auto* run = app.add_subcommand("run", "Run one experiment config");
    auto* suite = app.add_subcommand("suite", "Run the built-in configs for every experiment kind");
    std::string summary_path;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Render a Markdown report from a summary.json");
    report->add_option("--summary", summary_path, "summary.json produced by run")->required();
    report->add_option("--report-out", report_out, "Write the report here instead of stdout");
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : ex::kSchema;
    }

    ex::RunOptions opt;
    if (seed_opt->count() > 0) opt.seed = seed;
    opt.threads = threads;
    opt.quick = quick;

    if (*suite) return ex::run_suite(out, opt);

    if (*report) {
        ex::json summary;
        try {
            summary = ex::load_config(summary_path);
        } catch (const rktlab::measures::SchemaError& e) {
            ex::log(ex::LogLevel::Error, e.what());
            return ex::kSchema;
        }
        const std::string md = ex::render_report(summary);
        if (report_out.empty()) {
            std::cout << md;
            return 0;
        }
        try {
            ex::write_text(report_out, md);
        } catch (const std::exception& e) {
            ex::log(ex::LogLevel::Error, e.what());
            return ex::kOutput;
        }
        return 0;
    }

    if (config.empty()) {
        if (*run) {
            ex::log(ex::LogLevel::Error, "run needs --config <path>");
            return ex::kSchema;
        }
        std::cout << app.help();
        return 0;
    }
    ex::json cfg;
    try {
        cfg = ex::load_config(config);
    } catch (const rktlab::measures::SchemaError& e) {
        ex::log(ex::LogLevel::Error, std::string("schema error at ") + e.what());
        return ex::kSchema;
    }
    const int code = ex::run_and_write(cfg, out, opt);
    if (code == ex::kOk || code == ex::kCheckFailed) {
        std::ifstream in(std::filesystem::path(out) / "summary.json");
        std::cout << in.rdbuf();
    }
    return code;
}

//============================================================================
// shpattern_cli.cpp
//============================================================================
// Command-line front end: one subcommand per experiment, a flat key = value
// config file, and a handful of overriding flags. Exit codes: 0 success,
// 2 config/input error, 3 solver blow-up, 4 clock or grid mismatch.
#include <exception>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "shpattern/shpattern.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    bool no_noise = false;
    std::string snapshots;
    std::string mode;
};

// every subcommand shares --config/--seed/--out/--no-noise; the snapshot and
// mode flags are attached only where the experiment consumes them
void add_common(CLI::App* sub, Overrides& ov) {
    sub->add_option("--config", ov.config_path, "flat key = value config file")
        ->required();
    sub->add_option("--seed", ov.seed, "override the RNG seed");
    sub->add_option("--out", ov.out, "override the output directory");
    sub->add_flag("--no-noise", ov.no_noise, "force a deterministic run");
}

shpattern::RunConfig load(const CLI::App* sub, const Overrides& ov,
                          const std::string& experiment) {
    std::ifstream in(ov.config_path, std::ios::binary);
    if (!in) throw shpattern::IoError("cannot open config " + ov.config_path);
    const std::string text{std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>()};
    shpattern::RunConfig cfg = shpattern::parse_config(text);
    cfg.experiment = experiment;  // the verb wins over the config key
    if (sub->count("--seed") > 0) cfg.seed = ov.seed;
    if (sub->count("--out") > 0) cfg.out = ov.out;
    if (ov.no_noise) cfg.noise = false;
    const CLI::Option* snap = sub->get_option_no_throw("--snapshots");
    if (snap != nullptr && snap->count() > 0)
        cfg.snapshots = shpattern::detail::parse_double_list("snapshots", ov.snapshots);
    const CLI::Option* mode = sub->get_option_no_throw("--mode");
    if (mode != nullptr && mode->count() > 0) cfg.mode = ov.mode;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic pattern-formation toolbox"};
    app.require_subcommand(1);

    Overrides ov;
    CLI::App* gl = app.add_subcommand("simulate-gl", "amplitude equation on the slow clock");
    CLI::App* sh = app.add_subcommand("simulate-sh", "pattern equation on the fast clock");
    CLI::App* conv = app.add_subcommand("convert", "amplitude dumps to a pattern field");
    CLI::App* comp = app.add_subcommand("compare", "shared-noise two-solver comparison");
    CLI::App* ou = app.add_subcommand("ou-stats", "OU variance statistics table");
    for (CLI::App* sub : {gl, sh, conv, comp, ou}) add_common(sub, ov);
    for (CLI::App* sub : {gl, sh})
        sub->add_option("--snapshots", ov.snapshots, "comma-separated snapshot times");
    sh->add_option("--mode", ov.mode, "direct or shifted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        const shpattern::RunConfig cfg = load(sub, ov, sub->get_name());
        shpattern::RunReport rep;
        if (cfg.experiment == "simulate-gl") {
            rep = shpattern::simulate_gl(cfg);
        } else if (cfg.experiment == "simulate-sh") {
            rep = shpattern::simulate_sh(cfg);
        } else if (cfg.experiment == "convert") {
            rep = shpattern::convert_experiment(cfg);
        } else if (cfg.experiment == "compare") {
            rep = shpattern::run_compare(cfg).files;
        } else {
            rep = shpattern::ou_stats_experiment(cfg);
        }
        std::cout << "wrote " << (rep.out_dir / "manifest.txt").string() << " ("
                  << rep.files.size() << " data files)\n";
        return 0;
    } catch (const shpattern::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const shpattern::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const shpattern::BlowUp& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return 3;
    } catch (const shpattern::ClockMismatch& e) {
        std::cerr << "clock mismatch: " << e.what() << "\n";
        return 4;
    } catch (const shpattern::GridMismatch& e) {
        std::cerr << "grid mismatch: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

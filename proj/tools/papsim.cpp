#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "pap/config.hpp"
#include "pap/errors.hpp"
#include "pap/io.hpp"
#include "pap/runner.hpp"
#include "pap/version.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    bool check = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"papsim: piecewise adiabatic passage simulator for a 1+N level atom"};
    app.set_version_flag("--version", std::string("papsim ") + pap::version);
    app.require_subcommand(1);

    CliArgs args;
    std::string chosen;
    for (const auto& name : pap::known_experiments()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", args.config_path, "config file (JSON); omit for built-in defaults");
        sub->add_option("--out", args.out_dir, "output directory (overrides config)");
        sub->add_option("--threads", args.threads, "worker threads for grid points")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--check", args.check, "fail (exit 4) when a built-in result check fails");
        sub->callback([&chosen, name] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    pap::RunConfig config;
    try {
        config = args.config_path.empty() ? pap::default_config()
                                          : pap::parse_config(pap::read_text(args.config_path));
    } catch (const pap::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    pap::RunOptions options;
    options.threads = args.threads;
    options.check = args.check;
    options.out_override = args.out_dir;

    const pap::RunOutcome outcome = pap::run_subcommand(chosen, config, options);
    if (!outcome.error.empty()) {
        std::fprintf(stderr, "error: %s\n", outcome.error.c_str());
    } else {
        std::printf("wrote %zu file(s) to %s\n", outcome.files.size(), outcome.out_dir.c_str());
        for (const auto& name : outcome.failed_checks)
            std::printf("check failed: %s\n", name.c_str());
    }
    return outcome.exit_code;
}

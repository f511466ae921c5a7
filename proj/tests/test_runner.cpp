#include <doctest.h>

#include <filesystem>
#include <string>

#include "pap/config.hpp"
#include "pap/errors.hpp"
#include "pap/io.hpp"
#include "pap/runner.hpp"

using namespace pap;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("papsim_test_" + tag);
    fs::remove_all(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("synthesize writes data files and passes its checks") {
    RunOptions opts;
    opts.out_override = fresh_dir("synth");
    const RunOutcome outcome = run_subcommand("synthesize", default_config(), opts);
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.failed_checks.empty());
    for (const std::string name : {"envelope.csv", "spectrum.csv", "summary.json"})
        CHECK(fs::exists(fs::path(outcome.out_dir) / name));
    CHECK(fs::exists(fs::path(outcome.out_dir) / "manifest.json"));

    const std::string summary = read_text(outcome.out_dir + "/summary.json");
    CHECK(summary.find("train_spacing") != std::string::npos);
}

TEST_CASE("repeated runs are byte identical") {
    RunOptions opts;
    opts.out_override = fresh_dir("repro_a");
    const RunOutcome a = run_subcommand("synthesize", default_config(), opts);
    opts.out_override = fresh_dir("repro_b");
    const RunOutcome b = run_subcommand("synthesize", default_config(), opts);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    REQUIRE(a.files == b.files);
    for (const auto& name : a.files) {
        const std::string ca = read_text(a.out_dir + "/" + name);
        const std::string cb = read_text(b.out_dir + "/" + name);
        CHECK(fnv1a64(ca) == fnv1a64(cb));
        CHECK(ca == cb);
    }
}

TEST_CASE("experiment name must match the subcommand") {
    RunConfig cfg = default_config();
    cfg.experiment_name = "scan-rabi";
    cfg.params = RabiScanParams{};
    RunOptions opts;
    opts.out_override = fresh_dir("mismatch");
    const RunOutcome outcome = run_subcommand("simulate", cfg, opts);
    CHECK(outcome.exit_code == 2);
    CHECK(outcome.files.empty());
    CHECK(!fs::exists(fs::path(outcome.out_dir) / "summary.json"));
    CHECK(fs::exists(fs::path(outcome.out_dir) / "manifest.json"));  // error recorded
}

TEST_CASE("numerical failures exit with code 3") {
    RunConfig cfg = default_config();
    cfg.shape.windows = {WindowSpec{769.9, 0.1, 1.0}};
    cfg.shape.windows[0].delay_fs = 0.49 * cfg.grid().time_window();  // wraps around
    RunOptions opts;
    opts.out_override = fresh_dir("wrap");
    const RunOutcome outcome = run_subcommand("synthesize", cfg, opts);
    CHECK(outcome.exit_code == 3);
    CHECK(outcome.files.empty());
    const std::string manifest = read_text(outcome.out_dir + "/manifest.json");
    CHECK(manifest.find("numeric_error") != std::string::npos);
}

TEST_CASE("unknown subcommand is a config error") {
    RunOptions opts;
    opts.out_override = fresh_dir("unknown");
    CHECK(run_subcommand("frobnicate", default_config(), opts).exit_code == 2);
}

TEST_CASE("simulate emits a trajectory and passes unitarity") {
    RunConfig cfg = default_config();
    cfg.experiment_name = "simulate";
    SimulateParams p;
    p.target_area_eff_rad = constants::pi;
    cfg.params = p;
    cfg.integrator.convergence_check = true;
    RunOptions opts;
    opts.out_override = fresh_dir("sim");
    const RunOutcome outcome = run_subcommand("simulate", cfg, opts);
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.failed_checks.empty());
    const std::string traj = read_text(outcome.out_dir + "/trajectory.csv");
    CHECK(traj.rfind("t_fs,p_ground,p_4P1/2,p_4P3/2,phase12", 0) == 0);
}

TEST_CASE("output root environment variable") {
    RunConfig cfg = default_config();
    cfg.output_dir = "rel_out";
    setenv("PAPSIM_OUT_ROOT", "/tmp/papsim_root_test", 1);
    RunOptions opts;
    CHECK(resolve_output_dir(cfg, opts) == "/tmp/papsim_root_test/rel_out");
    opts.out_override = "/abs/override";
    CHECK(resolve_output_dir(cfg, opts) == "/abs/override");
    unsetenv("PAPSIM_OUT_ROOT");
    CHECK(resolve_output_dir(cfg, RunOptions{}) == "rel_out");
}

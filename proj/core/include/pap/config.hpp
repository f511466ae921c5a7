#ifndef PAP_CONFIG_HPP
#define PAP_CONFIG_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pap/atom.hpp"
#include "pap/dynamics.hpp"
#include "pap/experiments.hpp"
#include "pap/spectral.hpp"

namespace pap {

// Experiment parameter blocks, one per subcommand. A config file carries at
// most one of them; when absent, the subcommand runs with defaults.
struct SynthesizeParams {};

struct SimulateParams {
    std::optional<double> amplitude_scale;
    std::optional<double> target_area_eff_rad;
};

struct RabiScanParams {
    std::string line = "d1";
    std::vector<double> areas_rad;  // empty = default sweep 0 .. 3 pi
    double window_fwhm_nm = 1.8;
};

struct ApScanParams {
    std::string line = "d1";
    double chirp_fs2 = 270.0e3;
    std::vector<double> areas_rad;
    double window_fwhm_nm = 1.8;
};

struct Scan2DConfig {
    std::vector<double> areas_rad;  // empty = default sweep
    std::optional<double> delay_start_fs;
    std::optional<double> delay_end_fs;
    double delay_step_fs = 10.0;
};

struct CompletenessConfig {
    double delay_fs = 8000.0;
    double area_d1_rad = constants::pi;
    double area_d2_rad = constants::pi;
    double chirp_d1_fs2 = 270.0e3;
    double chirp_d2_fs2 = 270.0e3;
    double window_fwhm_nm = 0.9;
};

struct PhaseControlConfig {
    std::vector<double> offsets_rad{0.0, 0.5 * constants::pi, constants::pi};
    std::string offset_line = "d1";
    double a_eff_rad = constants::pi;
    double chirp_fs2 = 270.0e3;
    double window_fwhm_nm = 1.8;
};

struct AmplitudeControlConfig {
    std::vector<double> targets{0.25, 0.5, 1.0, 2.0, 4.0};
    int max_iterations = 2;
    double window_fwhm_nm = 1.8;
    double chirp_fs2 = 270.0e3;
    double a_eff_rad = constants::pi;
    double tolerance = 1e-3;
    bool independent_channels = false;
    std::optional<double> narrowband_fwhm_nm;  // set = also run the width comparison
};

using ExperimentParams =
    std::variant<std::monostate, SynthesizeParams, SimulateParams, RabiScanParams, ApScanParams,
                 Scan2DConfig, CompletenessConfig, PhaseControlConfig, AmplitudeControlConfig>;

// One file fully determines a run. Grid and source are kept in the units the
// file uses so that serialize/parse round-trips exactly.
struct RunConfig {
    AtomSpec atom;
    double grid_lambda_min_nm = 740.0;
    double grid_lambda_max_nm = 800.0;
    int grid_n_points = 1 << 15;
    double source_center_nm = 768.2;
    double source_fwhm_nm = 9.5;
    double carrier_nm = 768.2;
    ShapeSpec shape;
    IntegratorParams integrator;
    std::string experiment_name;  // empty = none specified
    ExperimentParams params;      // monostate when experiment_name is empty
    std::string output_dir = "out";

    SpectralGrid grid() const;
    Setup setup() const;
};

// Parses and validates a JSON config. Collects every schema violation
// (unknown keys, wrong types, bad values) and throws one config_error
// listing all of them with their key paths.
RunConfig parse_config(const std::string& json_text);

// Canonical serialization; parse_config(serialize_config(c)) round-trips.
std::string serialize_config(const RunConfig& config);

// The bundled potassium default: flat double-window demo shape.
RunConfig default_config();

// Subcommand names accepted by the runner.
const std::vector<std::string>& known_experiments();

}  // namespace pap

#endif

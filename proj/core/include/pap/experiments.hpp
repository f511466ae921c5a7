#ifndef PAP_EXPERIMENTS_HPP
#define PAP_EXPERIMENTS_HPP

#include <optional>
#include <vector>

#include "pap/atom.hpp"
#include "pap/dynamics.hpp"
#include "pap/observables.hpp"
#include "pap/spectral.hpp"

namespace pap {

// Everything an experiment needs besides its own shape parameters.
struct Setup {
    AtomSpec atom;
    SpectralGrid grid;
    double source_center_nm = 768.2;
    double source_fwhm_nm = 9.5;
    double carrier = 0.0;  // rad/fs; 0 = use angular_frequency(source_center_nm)
    IntegratorParams integrator;

    double carrier_or_default() const;
    SpectralField source() const;
};

// Potassium atom, 740-800 nm grid with 2^15 bins, 768.2 nm carrier.
Setup default_setup();

// The two spectral lines addressed by the shaper; d1/d2 are the first and
// second excited level of the atom.
enum class Line { d1, d2 };

// Builds the canonical two-window shape on the atom's first two lines.
// Window 0 sits on D1, window 1 on D2.
ShapeSpec two_line_shape(const Setup& setup, double fwhm_nm, double rel_d1, double rel_d2,
                         double chirp_d1 = 0.0, double chirp_d2 = 0.0, double phase_d1 = 0.0,
                         double phase_d2 = 0.0, double delay_d1 = 0.0, double delay_d2 = 0.0,
                         std::optional<double> pixel_width_nm = {});

// Last time at which |envelope| still exceeds 1e-4 of its peak.
double pump_end_time(const TemporalField& field);

// phi_12 = arg(b1* b2) of the trajectory's final state, free-evolved back to
// t = 0 so values from fields with different croppings are comparable.
double relative_phase_at_zero(const AmplitudeTrajectory& traj, const AtomSpec& atom);

// ---------------------------------------------------------------- Rabi / AP

struct SweepPoint {
    double area = 0.0;        // target (pre-chirp) area, rad
    double population = 0.0;  // excited population of the addressed level
    double ground = 0.0;
};

struct RabiScanResult {
    Line line = Line::d1;
    std::vector<SweepPoint> points;
    double fitted_area_scale = 0.0;  // s of the best sin^2(s A / 2) fit
};

// Flat-phase single-window sweep of the addressed line; the fitted area
// scale should be ~1 when calibration and propagation agree.
RabiScanResult run_rabi_calibration(const Setup& setup, Line line,
                                    const std::vector<double>& areas, double window_fwhm_nm = 1.8,
                                    std::optional<double> pixel_width_nm = {});

struct ApScanResult {
    Line line = Line::d1;
    double chirp_fs2 = 0.0;
    std::vector<SweepPoint> points;
    double plateau_min = 0.0;  // over points with area >= 1.2 pi
    double plateau_max = 0.0;
};

// Same sweep with quadratic spectral phase in the window.
ApScanResult run_single_line_ap(const Setup& setup, Line line, double chirp_fs2,
                                const std::vector<double>& areas, double window_fwhm_nm = 1.8,
                                std::optional<double> pixel_width_nm = {});

// ---------------------------------------------------------------- 2D scans

struct ScanSpec {
    Setup setup;
    ShapeSpec shape;                 // base double-window shape
    std::vector<double> area_axis;   // effective-area targets, rad
    std::vector<double> delay_axis;  // absolute pump-probe delays, fs
    int threads = 1;
};

struct ScanAreaResult {
    double area = 0.0;
    double p1 = 0.0, p2 = 0.0, p_ground = 0.0;
    double rel_phase = 0.0;  // phi_12 referenced to t = 0
    BeatAnalysis beat;
};

struct Scan2DResult {
    std::vector<double> area_axis;
    std::vector<double> delay_axis;
    std::vector<std::vector<double>> signal;  // [area][delay]
    std::vector<ScanAreaResult> per_area;
};

// For each target area: calibrate, propagate once, trace the beats over the
// common delay axis. The delay axis must start after the pump has ended.
Scan2DResult run_scan_2d(const ScanSpec& spec);

// Default delay axis: pump end + 0.5 ps .. pump end + 4.5 ps in 10 fs steps.
std::vector<double> default_delay_axis(const Setup& setup, const ShapeSpec& shape);

// ------------------------------------------------------------- completeness

struct CompletenessParams {
    double delay_fs = 8000.0;      // D1 window delay relative to D2
    double area_d1 = constants::pi;
    double area_d2 = constants::pi;
    double chirp_d1_fs2 = 270.0e3;
    double chirp_d2_fs2 = 270.0e3;
    double window_fwhm_nm = 0.9;
    std::optional<double> pixel_width_nm;
};

struct CompletenessResult {
    double residual_p1 = 0.0;  // final population of the delayed (D1) level
    double p2 = 0.0;
    double ground = 0.0;
    double mid_time_fs = 0.0;  // snapshot time between the pulses
    BeatTrace trace_before, trace_after;
    std::vector<std::pair<double, double>> spectrum_before, spectrum_after;
    double beat_peak_before = 0.0;   // power at the splitting frequency
    double beat_peak_after = 0.0;
    double reference_peak = 0.0;     // same extraction on an equal superposition
};

// D2 pulse at t=0, D1 pulse delay_fs later, each calibrated to its own area.
CompletenessResult run_completeness(const Setup& setup, const CompletenessParams& params);

// ------------------------------------------------------------ phase control

struct PhaseControlParams {
    std::vector<double> offsets_rad{0.0, 0.5 * constants::pi, constants::pi};
    Line offset_line = Line::d1;
    double a_eff = constants::pi;
    double chirp_fs2 = 270.0e3;
    double window_fwhm_nm = 1.8;
    int threads = 1;
};

struct PhaseControlPoint {
    double offset = 0.0;
    double beat_phase = 0.0;  // from the trace fit, common delay axis
    double shift = 0.0;       // beat_phase - beat_phase(first offset), wrapped
    double p1 = 0.0, p2 = 0.0;
    bool has_beat = false;
};

struct PhaseControlResult {
    std::vector<PhaseControlPoint> points;
};

// Adds a constant spectral phase to one window and reads the beat phase.
// A D1 offset of theta shifts the extracted phase by +theta, a D2 offset
// by -theta.
PhaseControlResult run_phase_control(const Setup& setup, const PhaseControlParams& params);

// -------------------------------------------------------- amplitude control

struct AmplitudeControlParams {
    double target_beta = 1.0;  // |b1|^2 / |b2|^2
    int max_iterations = 2;    // correction steps after the open-loop start
    double window_fwhm_nm = 1.8;
    double chirp_fs2 = 270.0e3;
    double a_eff = constants::pi;
    bool independent_channels = false;  // Stark-free reference mode
    double tolerance = 1e-3;            // stop when |achieved/target - 1| < tolerance
};

struct ControlIteration {
    double amplitude_ratio = 0.0;  // window amplitude ratio a_d1/a_d2
    double achieved_beta = 0.0;
    double ground_residual = 0.0;
};

struct ControlReport {
    double target_beta = 0.0;
    std::vector<ControlIteration> iterations;  // iteration 0 is the open-loop guess
    bool converged = false;
};

// Iteration 0 uses the Stark-free prediction r = sqrt(beta)/(w1/w2); each
// correction multiplies r by sqrt(target/achieved) and renormalizes the
// total scale to a_eff.
ControlReport run_amplitude_control(const Setup& setup, const AmplitudeControlParams& params);

struct NarrowbandComparison {
    std::vector<double> targets;
    std::vector<double> error_wide;    // iteration-0 |achieved/target - 1| at fwhm_wide
    std::vector<double> error_narrow;  // same at fwhm_narrow
    double fwhm_wide = 1.8, fwhm_narrow = 0.18;
};

// Open-loop (iteration 0) beta error at two window widths for each target.
NarrowbandComparison run_narrowband_comparison(const Setup& setup,
                                               const std::vector<double>& targets,
                                               double fwhm_wide = 1.8, double fwhm_narrow = 0.18,
                                               bool independent_channels = false,
                                               double chirp_fs2 = 270.0e3);

}  // namespace pap

#endif

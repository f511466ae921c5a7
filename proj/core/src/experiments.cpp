#include "pap/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "pap/errors.hpp"

namespace pap {

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw config_error(std::string(name) + " axis is empty");
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (!(axis[i] > axis[i - 1]))
            throw config_error(std::string(name) + " axis must be strictly increasing");
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min<std::size_t>(threads, n);
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

int window_index(Line line) { return line == Line::d1 ? 0 : 1; }

// Golden-section minimum of f over [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, int iters = 90) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

BeatTrace trace_at_delays(const FinalState& state, const AtomSpec& atom,
                          const std::vector<double>& delays) {
    const double period = beat_period_fs(atom);
    const double span = delays.back() - delays.front();
    const auto required = static_cast<std::size_t>(std::ceil(16.0 * span / period));
    if (delays.size() < required)
        throw numeric_error("scan: delay axis undersampled, need >= " + std::to_string(required) +
                            " samples");
    BeatTrace trace;
    trace.delays = delays;
    trace.signal.resize(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i)
        trace.signal[i] = ion_signal(state, atom, delays[i]);
    return trace;
}

// Signal of Eq.-style bichromatic detection evaluated directly on rotating
// frame amplitudes (valid at any trajectory sample, field on or off).
double instantaneous_signal(const std::complex<double>& b1, const std::complex<double>& b2,
                            const ProbeSpec& pr) {
    return std::norm(b1) * std::norm(pr.amp1) * pr.d11 + std::norm(b2) * std::norm(pr.amp2) * pr.d22 +
           2.0 * std::real(b1 * std::conj(b2) * pr.amp1 * std::conj(pr.amp2) * pr.d12);
}

struct SweepEngine {
    const Setup& setup;
    ShapeSpec shape;
    SpectralField source;
    TemporalField field;   // synthesized once; amplitude_scale set per point
    double unit_area;      // effective area at scale 1

    SweepEngine(const Setup& s, ShapeSpec sh)
        : setup(s), shape(std::move(sh)), source(s.source()) {
        field = synthesize(apply_shape(source, shape), s.carrier_or_default());
        unit_area = pulse_areas(shape, source, s.atom, 1.0).effective;
        if (unit_area == 0.0) throw numeric_error("sweep: shape has zero total amplitude");
    }

    AmplitudeTrajectory at_area(double area) const {
        TemporalField f = field;
        f.amplitude_scale = area / unit_area;
        return propagate(f, setup.atom, setup.integrator);
    }
};

}  // namespace

double Setup::carrier_or_default() const {
    return carrier > 0.0 ? carrier : angular_frequency(source_center_nm);
}

SpectralField Setup::source() const { return source_spectrum(grid, source_center_nm, source_fwhm_nm); }

Setup default_setup() {
    Setup s;
    s.atom = default_potassium();
    s.grid = make_grid_nm(740.0, 800.0, 1 << 15);
    s.carrier = angular_frequency(768.2);
    return s;
}

ShapeSpec two_line_shape(const Setup& setup, double fwhm_nm, double rel_d1, double rel_d2,
                         double chirp_d1, double chirp_d2, double phase_d1, double phase_d2,
                         double delay_d1, double delay_d2, std::optional<double> pixel_width_nm) {
    if (setup.atom.excited.size() < 2)
        throw config_error("two_line_shape: atom needs two excited levels");
    ShapeSpec shape;
    shape.windows = {
        WindowSpec{setup.atom.excited[0].transition_wavelength_nm, fwhm_nm, rel_d1, chirp_d1,
                   phase_d1, delay_d1},
        WindowSpec{setup.atom.excited[1].transition_wavelength_nm, fwhm_nm, rel_d2, chirp_d2,
                   phase_d2, delay_d2},
    };
    shape.pixel_width_nm = pixel_width_nm;
    return shape;
}

double pump_end_time(const TemporalField& field) {
    double peak = 0.0;
    for (const auto& e : field.envelope) peak = std::max(peak, std::abs(e));
    for (std::size_t i = field.envelope.size(); i-- > 0;)
        if (std::abs(field.envelope[i]) > 1e-4 * peak)
            return field.t_start + field.dt * static_cast<double>(i);
    return field.t_start;
}

double relative_phase_at_zero(const AmplitudeTrajectory& traj, const AtomSpec& atom) {
    if (traj.b_excited.size() < 2)
        throw config_error("relative_phase_at_zero: need two excited levels");
    const double t = traj.final_time();
    const double d1 = angular_frequency(atom.excited[0].transition_wavelength_nm) - traj.frame.carrier;
    const double d2 = angular_frequency(atom.excited[1].transition_wavelength_nm) - traj.frame.carrier;
    const std::complex<double> b1 = traj.b_excited[0].back() * std::polar(1.0, d1 * t);
    const std::complex<double> b2 = traj.b_excited[1].back() * std::polar(1.0, d2 * t);
    return std::arg(std::conj(b1) * b2);
}

RabiScanResult run_rabi_calibration(const Setup& setup, Line line, const std::vector<double>& areas,
                                    double window_fwhm_nm, std::optional<double> pixel_width_nm) {
    check_axis(areas, "area");
    const int w = window_index(line);
    ShapeSpec shape = two_line_shape(setup, window_fwhm_nm, w == 0 ? 1.0 : 0.0, w == 1 ? 1.0 : 0.0);
    shape.windows.erase(shape.windows.begin() + (1 - w));
    shape.pixel_width_nm = pixel_width_nm;
    const SweepEngine engine(setup, shape);

    RabiScanResult result;
    result.line = line;
    result.points.reserve(areas.size());
    for (double area : areas) {
        if (area == 0.0) {
            result.points.push_back({0.0, 0.0, 1.0});
            continue;
        }
        const AmplitudeTrajectory traj = engine.at_area(area);
        result.points.push_back(
            {area, traj.excited_population(static_cast<std::size_t>(w)), traj.ground_population()});
    }

    auto misfit = [&](double s) {
        double sum = 0.0;
        for (const auto& p : result.points) {
            const double model = analytic_rabi(s * p.area);
            sum += (p.population - model) * (p.population - model);
        }
        return sum;
    };
    result.fitted_area_scale = golden_min(misfit, 0.5, 1.5);
    return result;
}

ApScanResult run_single_line_ap(const Setup& setup, Line line, double chirp_fs2,
                                const std::vector<double>& areas, double window_fwhm_nm,
                                std::optional<double> pixel_width_nm) {
    if (chirp_fs2 < 0.0) throw config_error("run_single_line_ap: chirp must be >= 0");
    check_axis(areas, "area");
    const int w = window_index(line);
    ShapeSpec shape = two_line_shape(setup, window_fwhm_nm, 1.0, 1.0, chirp_fs2, chirp_fs2);
    shape.windows.erase(shape.windows.begin() + (1 - w));
    shape.pixel_width_nm = pixel_width_nm;
    const SweepEngine engine(setup, shape);

    ApScanResult result;
    result.line = line;
    result.chirp_fs2 = chirp_fs2;
    result.plateau_min = 1.0;
    result.plateau_max = 0.0;
    for (double area : areas) {
        const AmplitudeTrajectory traj = engine.at_area(area);
        const double pop = traj.excited_population(static_cast<std::size_t>(w));
        result.points.push_back({area, pop, traj.ground_population()});
        if (area >= 1.2 * constants::pi - 1e-9) {
            result.plateau_min = std::min(result.plateau_min, pop);
            result.plateau_max = std::max(result.plateau_max, pop);
        }
    }
    if (result.plateau_max < result.plateau_min) result.plateau_min = result.plateau_max = 0.0;
    return result;
}

std::vector<double> default_delay_axis(const Setup& setup, const ShapeSpec& shape) {
    const TemporalField f = synthesize(apply_shape(setup.source(), shape), setup.carrier_or_default());
    const double end = pump_end_time(f);
    std::vector<double> axis;
    for (double t = end + 500.0; t <= end + 4500.0 + 1e-9; t += 10.0) axis.push_back(t);
    return axis;
}

Scan2DResult run_scan_2d(const ScanSpec& spec) {
    check_axis(spec.area_axis, "area");
    check_axis(spec.delay_axis, "delay");
    for (std::size_t i = 2; i < spec.delay_axis.size(); ++i) {
        const double d0 = spec.delay_axis[1] - spec.delay_axis[0];
        if (std::abs((spec.delay_axis[i] - spec.delay_axis[i - 1]) - d0) > 1e-6 * d0)
            throw config_error("scan: delay axis must be uniformly spaced");
    }

    const Setup& setup = spec.setup;
    const SweepEngine engine(setup, spec.shape);
    const double end = pump_end_time(engine.field);
    if (spec.delay_axis.front() <= end)
        throw config_error("scan: delay axis must start after the pump ends (" +
                           std::to_string(end) + " fs)");
    const double split = fine_structure_splitting_thz(setup.atom);

    Scan2DResult result;
    result.area_axis = spec.area_axis;
    result.delay_axis = spec.delay_axis;
    result.signal.resize(spec.area_axis.size());
    result.per_area.resize(spec.area_axis.size());

    parallel_for(spec.area_axis.size(), spec.threads, [&](std::size_t i) {
        const double area = spec.area_axis[i];
        const AmplitudeTrajectory traj = engine.at_area(area);
        const FinalState state = state_at(traj, setup.atom, spec.delay_axis.front());
        const BeatTrace trace = trace_at_delays(state, setup.atom, spec.delay_axis);

        ScanAreaResult r;
        r.area = area;
        r.p1 = traj.excited_population(0);
        r.p2 = traj.excited_population(1);
        r.p_ground = traj.ground_population();
        r.rel_phase = relative_phase_at_zero(traj, setup.atom);
        r.beat = analyze_beat(trace, split);
        result.per_area[i] = r;
        result.signal[i] = trace.signal;
    });
    return result;
}

CompletenessResult run_completeness(const Setup& setup, const CompletenessParams& params) {
    if (!(params.delay_fs > 0.0)) throw config_error("completeness: delay must be positive");
    const SpectralField source = setup.source();
    const AtomSpec& atom = setup.atom;

    // calibrate each window alone to its own target area
    double rel[2] = {0.0, 0.0};
    const double areas[2] = {params.area_d1, params.area_d2};
    const double chirps[2] = {params.chirp_d1_fs2, params.chirp_d2_fs2};
    const double delays[2] = {params.delay_fs, 0.0};
    for (int k = 0; k < 2; ++k) {
        if (areas[k] == 0.0) continue;
        ShapeSpec alone = two_line_shape(setup, params.window_fwhm_nm, k == 0 ? 1.0 : 0.0,
                                         k == 1 ? 1.0 : 0.0);
        alone.windows.erase(alone.windows.begin() + (1 - k));
        alone.pixel_width_nm = params.pixel_width_nm;
        rel[k] = areas[k] / pulse_areas(alone, source, atom, 1.0).effective;
    }
    ShapeSpec shape = two_line_shape(setup, params.window_fwhm_nm, rel[0], rel[1], chirps[0],
                                     chirps[1], 0.0, 0.0, delays[0], delays[1],
                                     params.pixel_width_nm);
    const TemporalField field = synthesize(apply_shape(source, shape), setup.carrier_or_default());
    const AmplitudeTrajectory traj = propagate(field, atom, setup.integrator);

    CompletenessResult result;
    result.residual_p1 = traj.excited_population(0);
    result.p2 = traj.excited_population(1);
    result.ground = traj.ground_population();
    result.mid_time_fs = 0.5 * params.delay_fs;

    // between-pulse trace straight from the trajectory samples
    const double lo = 0.3 * params.delay_fs, hi = 0.7 * params.delay_fs;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] >= lo && traj.times[i] <= hi) idx.push_back(i);
    if (idx.size() < 64)
        throw numeric_error("completeness: too few trajectory samples between the pulses");
    // thin to roughly 10 fs spacing, keeping uniformity
    const double native_step = traj.times[idx[1]] - traj.times[idx[0]];
    const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(10.0 / native_step));
    for (std::size_t i = 0; i + stride <= idx.size(); i += stride) {
        result.trace_before.delays.push_back(traj.times[idx[i]]);
        result.trace_before.signal.push_back(
            instantaneous_signal(traj.b_excited[0][idx[i]], traj.b_excited[1][idx[i]], atom.probe));
    }

    const FinalState end_state = final_state_of(traj);
    const int n_after = 601;
    result.trace_after =
        beat_trace(end_state, atom, end_state.t_ref, end_state.t_ref + 6000.0, n_after);

    result.spectrum_before = trace_power_spectrum(result.trace_before);
    result.spectrum_after = trace_power_spectrum(result.trace_after);

    const double split = fine_structure_splitting_thz(atom);
    result.beat_peak_before = spectrum_peak_power(result.spectrum_before, split, 0.2);
    result.beat_peak_after = spectrum_peak_power(result.spectrum_after, split, 0.2);

    const double norm = std::sqrt(0.5);
    const FinalState reference{std::complex<double>{norm, 0.0}, std::complex<double>{norm, 0.0},
                               end_state.t_ref};
    const BeatTrace ref_trace =
        beat_trace(reference, atom, end_state.t_ref, end_state.t_ref + 6000.0, n_after);
    result.reference_peak = spectrum_peak_power(trace_power_spectrum(ref_trace), split, 0.2);
    return result;
}

PhaseControlResult run_phase_control(const Setup& setup, const PhaseControlParams& params) {
    if (params.offsets_rad.empty()) throw config_error("phase_control: no offsets given");
    const SpectralField source = setup.source();
    const double split = fine_structure_splitting_thz(setup.atom);

    auto shape_for = [&](double theta) {
        return two_line_shape(setup, params.window_fwhm_nm, 1.0, 1.0, params.chirp_fs2,
                              params.chirp_fs2, params.offset_line == Line::d1 ? theta : 0.0,
                              params.offset_line == Line::d2 ? theta : 0.0);
    };
    const double scale =
        calibrate_scale_for_area(shape_for(0.0), source, setup.atom, params.a_eff);

    // common delay axis across offsets: the pump end moves a little with the
    // offset, so take the latest one
    double end = 0.0;
    std::vector<TemporalField> fields(params.offsets_rad.size());
    for (std::size_t i = 0; i < params.offsets_rad.size(); ++i) {
        fields[i] = synthesize(apply_shape(source, shape_for(params.offsets_rad[i])),
                               setup.carrier_or_default());
        fields[i].amplitude_scale = scale;
        end = std::max(end, pump_end_time(fields[i]));
    }
    std::vector<double> axis;
    for (double t = end + 500.0; t <= end + 4500.0 + 1e-9; t += 10.0) axis.push_back(t);

    PhaseControlResult result;
    result.points.resize(params.offsets_rad.size());
    parallel_for(params.offsets_rad.size(), params.threads, [&](std::size_t i) {
        const AmplitudeTrajectory traj = propagate(fields[i], setup.atom, setup.integrator);
        const BeatTrace trace = trace_at_delays(state_at(traj, setup.atom, axis.front()), setup.atom, axis);
        const BeatAnalysis beat = analyze_beat(trace, split);
        PhaseControlPoint p;
        p.offset = params.offsets_rad[i];
        p.beat_phase = beat.phase;
        p.has_beat = beat.has_beat;
        p.p1 = traj.excited_population(0);
        p.p2 = traj.excited_population(1);
        result.points[i] = p;
    });

    const double base = result.points.front().beat_phase;
    for (auto& p : result.points) {
        double d = std::fmod(p.beat_phase - base + 3.0 * constants::pi, 2.0 * constants::pi);
        p.shift = d - constants::pi;
    }
    return result;
}

ControlReport run_amplitude_control(const Setup& setup, const AmplitudeControlParams& params) {
    if (!(params.target_beta > 0.0)) throw config_error("amplitude_control: target beta must be > 0");
    if (params.max_iterations < 0) throw config_error("amplitude_control: negative iteration count");
    const SpectralField source = setup.source();
    const AtomSpec& atom = setup.atom;
    const double weight_ratio = atom.excited[0].dipole_weight / atom.excited[1].dipole_weight;

    ControlReport report;
    report.target_beta = params.target_beta;

    double ratio = std::sqrt(params.target_beta) / weight_ratio;  // Stark-free start
    for (int it = 0; it <= params.max_iterations; ++it) {
        ShapeSpec shape = two_line_shape(setup, params.window_fwhm_nm, ratio, 1.0, params.chirp_fs2,
                                         params.chirp_fs2);
        const double scale = calibrate_scale_for_area(shape, source, atom, params.a_eff);

        AmplitudeTrajectory traj;
        if (params.independent_channels) {
            std::vector<TemporalField> fields;
            for (int k = 0; k < 2; ++k) {
                ShapeSpec alone = shape;
                alone.windows.erase(alone.windows.begin() + (1 - k));
                TemporalField f =
                    synthesize(apply_shape(source, alone), setup.carrier_or_default());
                f.amplitude_scale = scale;
                fields.push_back(std::move(f));
            }
            traj = propagate_independent(fields, atom, setup.integrator);
        } else {
            TemporalField f = synthesize(apply_shape(source, shape), setup.carrier_or_default());
            f.amplitude_scale = scale;
            traj = propagate(f, atom, setup.integrator);
        }

        const double p1 = traj.excited_population(0);
        const double p2 = traj.excited_population(1);
        if (p2 <= 0.0 || p1 <= 0.0)
            throw numeric_error("amplitude_control: a level came out numerically empty");
        const double beta = p1 / p2;
        report.iterations.push_back({ratio, beta, traj.ground_population()});
        if (std::abs(beta / params.target_beta - 1.0) < params.tolerance) {
            report.converged = true;
            break;
        }
        ratio *= std::sqrt(params.target_beta / beta);
    }
    return report;
}

NarrowbandComparison run_narrowband_comparison(const Setup& setup,
                                               const std::vector<double>& targets,
                                               double fwhm_wide, double fwhm_narrow,
                                               bool independent_channels, double chirp_fs2) {
    if (targets.empty()) throw config_error("narrowband_comparison: no targets");
    NarrowbandComparison cmp;
    cmp.targets = targets;
    cmp.fwhm_wide = fwhm_wide;
    cmp.fwhm_narrow = fwhm_narrow;
    for (double target : targets) {
        AmplitudeControlParams p;
        p.target_beta = target;
        p.max_iterations = 0;
        p.chirp_fs2 = chirp_fs2;
        p.independent_channels = independent_channels;
        p.tolerance = 0.0;  // never report convergence, just evaluate
        p.window_fwhm_nm = fwhm_wide;
        const ControlReport wide = run_amplitude_control(setup, p);
        p.window_fwhm_nm = fwhm_narrow;
        const ControlReport narrow = run_amplitude_control(setup, p);
        cmp.error_wide.push_back(std::abs(wide.iterations[0].achieved_beta / target - 1.0));
        cmp.error_narrow.push_back(std::abs(narrow.iterations[0].achieved_beta / target - 1.0));
    }
    return cmp;
}

}  // namespace pap

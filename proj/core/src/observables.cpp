#include "pap/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "pap/errors.hpp"
#include "fft_util.hpp"

namespace pap {

namespace {

constexpr double two_pi = 2.0 * constants::pi;

double wrap_pi(double x) {
    x = std::fmod(x + constants::pi, two_pi);
    if (x <= 0.0) x += two_pi;
    return x - constants::pi;
}

// Linear LSQ of signal = A + C sin(w tau) + D cos(w tau) at fixed angular
// frequency w (rad/fs); returns残 sum of squares through *sse.
Eigen::Vector3d fit_at_frequency(const BeatTrace& trace, double w, double* sse) {
    const int n = static_cast<int>(trace.delays.size());
    Eigen::MatrixXd m(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double x = w * trace.delays[i];
        m(i, 0) = 1.0;
        m(i, 1) = std::sin(x);
        m(i, 2) = std::cos(x);
        y(i) = trace.signal[i];
    }
    const Eigen::Vector3d coef = (m.transpose() * m).ldlt().solve(m.transpose() * y);
    if (sse) *sse = (m * coef - y).squaredNorm();
    return coef;
}

}  // namespace

FinalState final_state_of(const AmplitudeTrajectory& traj) {
    if (traj.b_excited.size() < 2)
        throw config_error("final_state_of: trajectory has fewer than two excited levels");
    return FinalState{traj.b_excited[0].back(), traj.b_excited[1].back(), traj.final_time()};
}

FinalState state_at(const AmplitudeTrajectory& traj, const AtomSpec& atom, double t_ref_fs) {
    const FinalState end = final_state_of(traj);
    const double back = end.t_ref - t_ref_fs;
    const double d1 =
        angular_frequency(atom.excited[0].transition_wavelength_nm) - traj.frame.carrier;
    const double d2 =
        angular_frequency(atom.excited[1].transition_wavelength_nm) - traj.frame.carrier;
    return FinalState{end.b1 * std::polar(1.0, d1 * back), end.b2 * std::polar(1.0, d2 * back),
                      t_ref_fs};
}

double ion_signal(const FinalState& state, const AtomSpec& atom, double delay_fs) {
    if (atom.excited.size() < 2)
        throw config_error("ion_signal: atom needs two excited levels");
    if (delay_fs < state.t_ref)
        throw config_error("ion_signal: delay precedes the state reference time");
    const double p = std::norm(state.b1) + std::norm(state.b2);
    if (p > 1.0 + 1e-9)
        throw numeric_error("ion_signal: excited populations exceed 1");

    const double dt = delay_fs - state.t_ref;
    const std::complex<double> b1 =
        state.b1 * std::polar(1.0, -angular_frequency(atom.excited[0].transition_wavelength_nm) * dt);
    const std::complex<double> b2 =
        state.b2 * std::polar(1.0, -angular_frequency(atom.excited[1].transition_wavelength_nm) * dt);

    const ProbeSpec& pr = atom.probe;
    const double direct = std::norm(b1) * std::norm(pr.amp1) * pr.d11 +
                          std::norm(b2) * std::norm(pr.amp2) * pr.d22;
    const double interference =
        2.0 * std::real(b1 * std::conj(b2) * pr.amp1 * std::conj(pr.amp2) * pr.d12);
    return direct + interference;
}

BeatTrace beat_trace(const FinalState& state, const AtomSpec& atom, double delay_start_fs,
                     double delay_end_fs, int n) {
    if (!(delay_end_fs > delay_start_fs)) throw config_error("beat_trace: empty delay range");
    if (n < 2) throw config_error("beat_trace: need at least two samples");
    const double period = beat_period_fs(atom);
    const int required =
        static_cast<int>(std::ceil(16.0 * (delay_end_fs - delay_start_fs) / period));
    if (n < required)
        throw numeric_error("beat_trace: undersampled (" + std::to_string(n) + " samples, need >= " +
                            std::to_string(required) + " for 16 per beat period)");
    BeatTrace trace;
    trace.delays.resize(n);
    trace.signal.resize(n);
    const double step = (delay_end_fs - delay_start_fs) / (n - 1);
    for (int i = 0; i < n; ++i) {
        trace.delays[i] = delay_start_fs + step * i;
        trace.signal[i] = ion_signal(state, atom, trace.delays[i]);
    }
    return trace;
}

BeatAnalysis analyze_beat(const BeatTrace& trace, double expected_frequency_thz) {
    const int n = static_cast<int>(trace.delays.size());
    if (n < 4) throw config_error("analyze_beat: trace too short");
    if (!(expected_frequency_thz > 0.0))
        throw config_error("analyze_beat: expected frequency must be positive");
    const double span = trace.delays.back() - trace.delays.front();
    const double expected_period = 1000.0 / expected_frequency_thz;
    if (span < 3.0 * expected_period)
        throw numeric_error("analyze_beat: trace spans fewer than 3 expected periods");

    double mean = 0.0;
    for (double s : trace.signal) mean += s;
    mean /= n;
    double variance = 0.0;
    for (double s : trace.signal) variance += (s - mean) * (s - mean);

    BeatAnalysis out;
    out.mean_level = mean;
    if (variance <= 1e-24 * std::max(1.0, mean * mean) * n) {
        out.frequency_thz = expected_frequency_thz;  // flat trace: nothing to fit
        return out;
    }

    // golden-section refinement of the fit frequency around the seed
    const double w0 = two_pi * expected_frequency_thz / 1000.0;  // rad/fs
    double lo = 0.7 * w0, hi = 1.3 * w0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double s1, s2;
    fit_at_frequency(trace, x1, &s1);
    fit_at_frequency(trace, x2, &s2);
    for (int it = 0; it < 90; ++it) {
        if (s1 < s2) {
            hi = x2;
            x2 = x1;
            s2 = s1;
            x1 = hi - gr * (hi - lo);
            fit_at_frequency(trace, x1, &s1);
        } else {
            lo = x1;
            x1 = x2;
            s1 = s2;
            x2 = lo + gr * (hi - lo);
            fit_at_frequency(trace, x2, &s2);
        }
    }
    const double w = 0.5 * (lo + hi);
    double sse = 0.0;
    const Eigen::Vector3d coef = fit_at_frequency(trace, w, &sse);

    if (sse > 0.2 * variance) return out;  // no-beat: contrast 0, phase undefined

    const double a = coef(0), c = coef(1), d = coef(2);
    out.frequency_thz = 1000.0 * w / two_pi;
    out.amplitude = std::hypot(c, d);
    out.contrast = a > 0.0 ? std::min(out.amplitude / a, 1.0) : 0.0;
    // signal = A + B sin(w tau + phi_fit) = A + B cos(w tau - phi_12)
    const double phi_fit = std::atan2(d, c);
    out.phase = wrap_pi(0.5 * constants::pi - phi_fit);
    out.mean_level = a;
    out.has_beat = true;
    return out;
}

std::vector<std::pair<double, double>> trace_power_spectrum(const BeatTrace& trace) {
    const int n = static_cast<int>(trace.delays.size());
    if (n < 64) throw numeric_error("trace_power_spectrum: need at least 64 samples");
    const double dtau = trace.delays[1] - trace.delays[0];

    double mean = 0.0;
    for (double s : trace.signal) mean += s;
    mean /= n;

    int n_pad = 1;
    while (n_pad < 4 * n) n_pad <<= 1;
    std::vector<std::complex<double>> x(n_pad, {0.0, 0.0});
    for (int i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(two_pi * i / (n - 1));
        x[i] = (trace.signal[i] - mean) * hann;
    }
    const auto spec = detail::fft_forward(x);

    std::vector<std::pair<double, double>> out;
    out.reserve(n_pad / 2);
    for (int k = 0; k <= n_pad / 2; ++k)
        out.emplace_back(1000.0 * k / (n_pad * dtau), std::norm(spec[k]));
    return out;
}

double spectrum_peak_power(const std::vector<std::pair<double, double>>& spectrum,
                           double frequency_thz, double half_width_thz) {
    double best = 0.0;
    for (const auto& [f, p] : spectrum)
        if (std::abs(f - frequency_thz) <= half_width_thz) best = std::max(best, p);
    return best;
}

}  // namespace pap

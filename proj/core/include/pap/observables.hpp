#ifndef PAP_OBSERVABLES_HPP
#define PAP_OBSERVABLES_HPP

#include <complex>
#include <utility>
#include <vector>

#include "pap/atom.hpp"
#include "pap/dynamics.hpp"

namespace pap {

// Excited-state amplitudes frozen at a reference time, the input to the
// bichromatic detection signal.
struct FinalState {
    std::complex<double> b1{0.0, 0.0};
    std::complex<double> b2{0.0, 0.0};
    double t_ref = 0.0;  // fs
};

// First two excited amplitudes at the end of a trajectory.
FinalState final_state_of(const AmplitudeTrajectory& traj);

// Final state free-evolved to the given reference time (exact when the drive
// has ended by then; detuning differences equal transition-frequency
// differences, so traces built from this state are frame-consistent).
FinalState state_at(const AmplitudeTrajectory& traj, const AtomSpec& atom, double t_ref_fs);

struct BeatTrace {
    std::vector<double> delays;  // fs, uniform, strictly increasing
    std::vector<double> signal;  // arbitrary units, non-negative
};

struct BeatAnalysis {
    double frequency_thz = 0.0;
    double contrast = 0.0;     // B/A of the fitted offset+sinusoid
    double phase = 0.0;        // phi_12 convention, referenced to delay 0, in (-pi, pi]
    double mean_level = 0.0;   // fitted A, signal units
    double amplitude = 0.0;    // fitted B, signal units
    bool has_beat = false;
};

// Two-photon bichromatic ionization signal: the amplitudes are evolved
// freely to the given delay and fed through
//   |b1|^2 |e1|^2 d11 + |b2|^2 |e2|^2 d22 + 2 Re[b1 b2* e1 e2* d12].
double ion_signal(const FinalState& state, const AtomSpec& atom, double delay_fs);

// Uniform sampling of ion_signal over [delay_start, delay_end]. Requires at
// least 16 samples per beat period.
BeatTrace beat_trace(const FinalState& state, const AtomSpec& atom, double delay_start_fs,
                     double delay_end_fs, int n);

// Least-squares fit of A + B sin(2 pi f tau + phi), frequency seeded at
// expected_frequency_thz. The returned phase is mapped to the phi_12
// convention (signal = A + B cos(2 pi f tau - phi_12)). A fit residual above
// 20% of the signal variance yields a no-beat result (contrast 0).
BeatAnalysis analyze_beat(const BeatTrace& trace, double expected_frequency_thz);

// Hann-windowed DFT magnitude squared of the mean-subtracted trace;
// (frequency THz, power) pairs up to Nyquist. Requires >= 64 samples.
std::vector<std::pair<double, double>> trace_power_spectrum(const BeatTrace& trace);

// Largest power within +-half_width_thz of frequency_thz.
double spectrum_peak_power(const std::vector<std::pair<double, double>>& spectrum,
                           double frequency_thz, double half_width_thz);

}  // namespace pap

#endif

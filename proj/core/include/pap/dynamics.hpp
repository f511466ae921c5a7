#ifndef PAP_DYNAMICS_HPP
#define PAP_DYNAMICS_HPP

#include <complex>
#include <string>
#include <vector>

#include "pap/atom.hpp"
#include "pap/spectral.hpp"

namespace pap {

// Rotating-frame convention attached to a trajectory.
struct Frame {
    double carrier = 0.0;  // rad/fs
    std::string convention = "rwa-single-carrier";
};

// Sampled solution of the rotating-wave Schroedinger equation. b0 is the
// ground amplitude, b_excited[i] the amplitude of excited level i, one entry
// per sample time. Amplitudes are in the frame rotating at the carrier; the
//与-carrier global phase drops out of every observable.
struct AmplitudeTrajectory {
    std::vector<double> times;                                   // fs
    std::vector<std::complex<double>> b0;
    std::vector<std::vector<std::complex<double>>> b_excited;    // [level][sample]
    Frame frame;
    double max_unitarity_drift = 0.0;

    std::size_t n_samples() const { return times.size(); }
    // |b0|^2 and |b_i|^2 at the last sample
    double ground_population() const;
    double excited_population(std::size_t level) const;
    std::complex<double> final_excited(std::size_t level) const;
    double final_time() const { return times.empty() ? 0.0 : times.back(); }
};

// Per-transition pulse areas (rad) and the effective area
// A_eff = sqrt(sum_i A_i^2).
struct AreaReport {
    std::vector<double> areas;
    double effective = 0.0;
};

struct IntegratorParams {
    double dt_max_fs = 0.25;           // upper bound on the RK4 step
    std::string method = "rk4";        // fixed-step classical Runge-Kutta
    bool convergence_check = false;    // run the dt/2 comparison after propagating

    void validate() const;             // throws config_error (dt_max must be <= 0.5 fs)
};

// A_i = integral of |Omega_i(t)| dt, where Omega_i is the Rabi frequency the
// i-th transition would see from its own window synthesized alone with the
// chirp, phase and delay removed ("pre-chirp" area: chirping a window does
// not change its reported area). Windows are matched to excited levels by
// nearest resonance; two windows mapping to one level is an error.
AreaReport pulse_areas(const ShapeSpec& shape, const SpectralField& source,
                       const AtomSpec& atom, double amplitude_scale);

// Scale such that pulse_areas(..., scale) reports the target effective area
// (linear in the field, so a single division).
double calibrate_scale_for_area(const ShapeSpec& shape, const SpectralField& source,
                                const AtomSpec& atom, double target_a_eff);

// Integrates, in the frame rotating at field.carrier,
//   i b0'   = sum_i chi_i(t)/2 b_i
//   i b_i'  = Delta_i b_i + conj(chi_i(t))/2 b0
// with Delta_i = omega_i - carrier and chi_i(t) = dipole_weight_i *
// amplitude_scale * envelope(t). Every transition is driven by the full
// envelope; that coupling is what produces the dynamic Stark cross-talk
// between channels. Starts from the ground state.
AmplitudeTrajectory propagate(const TemporalField& field, const AtomSpec& atom,
                              const IntegratorParams& params);

// Same equations but starting from the given state vector (b0, b1, ..., bN),
// which must be normalized. Used by time-reversal checks.
AmplitudeTrajectory propagate_from(const TemporalField& field, const AtomSpec& atom,
                                   const IntegratorParams& params,
                                   const std::vector<std::complex<double>>& initial);

// Stark-free reference mode: excited level i is driven only by fields[i]
// (one temporal field per excited level, all on the same time grid).
AmplitudeTrajectory propagate_independent(const std::vector<TemporalField>& fields,
                                          const AtomSpec& atom,
                                          const IntegratorParams& params);

// Resonant two-level transfer, standard pi-pulse convention: sin^2(area/2).
double analytic_rabi(double area);

// Transfer probability 1 - exp(-pi Omega^2 / (2 beta)) for the linear sweep
// H = 1/2 [[-beta t, Omega], [Omega, beta t]].
double landau_zener(double rabi, double sweep_rate);

// Max over all states of | |b|^2(dt) - |b|^2(dt/2) | at the end time.
double convergence_report(const TemporalField& field, const AtomSpec& atom,
                          const IntegratorParams& params);

}  // namespace pap

#endif

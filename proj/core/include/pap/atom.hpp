#ifndef PAP_ATOM_HPP
#define PAP_ATOM_HPP

#include <complex>
#include <string>
#include <vector>

namespace pap {

// Unit conventions used throughout the library:
//   time        fs
//   frequency   rad/fs (angular) or THz (ordinary, where stated)
//   wavelength  nm
namespace constants {
inline constexpr double speed_of_light_nm_fs = 299.792458;  // c in nm/fs
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

// omega = 2*pi*c / lambda, in rad/fs. Throws for non-positive wavelength.
double angular_frequency(double wavelength_nm);

// Probe-field constants of the bichromatic two-photon detection signal:
// amp1/amp2 are the probe field amplitudes at the two resonant probe
// frequencies, d11/d22/d12 the two-photon dipole weights.
struct ProbeSpec {
    std::complex<double> amp1{1.0, 0.0};
    std::complex<double> amp2{1.0, 0.0};
    double d11 = 1.0;
    double d22 = 1.0;
    std::complex<double> d12{1.0, 0.0};
};

// One ground->excited transition.
struct LevelSpec {
    std::string label;
    double transition_wavelength_nm = 0.0;
    double dipole_weight = 0.0;  // relative to the reference transition
};

struct AtomSpec {
    std::string ground_label;
    std::vector<LevelSpec> excited;
    ProbeSpec probe;

    // Throws config_error on violated invariants (empty level list,
    // non-positive or duplicate wavelengths, non-positive weights, no unit
    // reference weight, |d12| > sqrt(d11*d22)).
    void validate() const;
};

// c*|1/lambda1 - 1/lambda2| for the first two excited levels, in THz.
double fine_structure_splitting_thz(const AtomSpec& spec);

// Reciprocal of the fine-structure splitting, in fs.
double beat_period_fs(const AtomSpec& spec);

// The default simulated atom: potassium 4S1/2 ground state with the
// 4P1/2 (D1, 769.9 nm) and 4P3/2 (D2, 766.5 nm) excited levels, dipole
// weights 1:sqrt(2), and equal unit probe weights with d12 = 1.
AtomSpec default_potassium();

}  // namespace pap

#endif

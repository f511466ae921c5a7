#include "pap/atom.hpp"

#include <cmath>

#include "pap/errors.hpp"

namespace pap {

double angular_frequency(double wavelength_nm) {
    if (!(wavelength_nm > 0.0))
        throw config_error("angular_frequency: wavelength must be > 0 nm, got " +
                           std::to_string(wavelength_nm));
    return 2.0 * constants::pi * constants::speed_of_light_nm_fs / wavelength_nm;
}

void AtomSpec::validate() const {
    if (excited.empty())
        throw config_error("atom: excited level list is empty");
    bool has_reference = false;
    for (std::size_t i = 0; i < excited.size(); ++i) {
        const auto& lv = excited[i];
        if (!(lv.transition_wavelength_nm > 0.0))
            throw config_error("atom: level '" + lv.label + "' has non-positive wavelength");
        if (!(lv.dipole_weight > 0.0))
            throw config_error("atom: level '" + lv.label + "' has non-positive dipole weight");
        if (lv.dipole_weight == 1.0) has_reference = true;
        for (std::size_t j = i + 1; j < excited.size(); ++j) {
            if (excited[j].transition_wavelength_nm == lv.transition_wavelength_nm)
                throw config_error("atom: levels '" + lv.label + "' and '" + excited[j].label +
                                   "' share the same transition wavelength");
        }
    }
    if (!has_reference)
        throw config_error("atom: no reference transition (one dipole weight must equal 1.0)");
    if (!(probe.d11 >= 0.0) || !(probe.d22 >= 0.0))
        throw config_error("atom: probe d11/d22 must be non-negative");
    const double bound = std::sqrt(probe.d11 * probe.d22);
    if (std::abs(probe.d12) > bound * (1.0 + 1e-12) + 1e-300)
        throw config_error("atom: |d12| exceeds sqrt(d11*d22)");
}

double fine_structure_splitting_thz(const AtomSpec& spec) {
    if (spec.excited.size() < 2)
        throw config_error("fine_structure_splitting: need at least two excited levels");
    const double l1 = spec.excited[0].transition_wavelength_nm;
    const double l2 = spec.excited[1].transition_wavelength_nm;
    // c/lambda in 1/fs is 1000 THz
    return 1000.0 * constants::speed_of_light_nm_fs * std::abs(1.0 / l1 - 1.0 / l2);
}

double beat_period_fs(const AtomSpec& spec) {
    const double thz = fine_structure_splitting_thz(spec);
    if (thz == 0.0)
        throw numeric_error("beat_period: degenerate levels (zero splitting)");
    return 1000.0 / thz;  // 1/THz = 1000 fs
}

AtomSpec default_potassium() {
    AtomSpec spec;
    spec.ground_label = "4S1/2";
    spec.excited = {
        {"4P1/2", 769.9, 1.0},
        {"4P3/2", 766.5, std::sqrt(2.0)},
    };
    spec.probe = ProbeSpec{};  // equal unit probe amplitudes, d11 = d22 = d12 = 1
    return spec;
}

}  // namespace pap

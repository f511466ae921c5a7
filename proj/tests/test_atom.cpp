#include <doctest.h>

#include <cmath>

#include "pap/atom.hpp"
#include "pap/errors.hpp"

using namespace pap;
using doctest::Approx;

TEST_CASE("angular frequency conversion") {
    CHECK(angular_frequency(768.2) == Approx(2.452).epsilon(5e-4));
    CHECK(angular_frequency(2.0 * 768.2) == Approx(0.5 * angular_frequency(768.2)).epsilon(1e-14));
    CHECK(angular_frequency(766.5) - angular_frequency(769.9) ==
          Approx(1.085e-2).epsilon(1e-3));
    CHECK_THROWS_AS(angular_frequency(0.0), config_error);
    CHECK_THROWS_AS(angular_frequency(-5.0), config_error);
}

TEST_CASE("angular frequency is strictly decreasing in wavelength") {
    double prev = angular_frequency(500.0);
    for (double lam = 501.0; lam <= 1000.0; lam += 7.0) {
        const double w = angular_frequency(lam);
        CHECK(w < prev);
        prev = w;
    }
}

TEST_CASE("fine structure splitting") {
    const AtomSpec atom = default_potassium();
    CHECK(fine_structure_splitting_thz(atom) == Approx(1.73).epsilon(0.01 / 1.73));
    CHECK(fine_structure_splitting_thz(atom) == Approx(1.727).epsilon(1e-3));

    AtomSpec degenerate = atom;
    degenerate.excited[1].transition_wavelength_nm = degenerate.excited[0].transition_wavelength_nm;
    CHECK(fine_structure_splitting_thz(degenerate) == 0.0);
    CHECK_THROWS_AS(beat_period_fs(degenerate), numeric_error);

    AtomSpec single = atom;
    single.excited.resize(1);
    CHECK_THROWS_AS(fine_structure_splitting_thz(single), config_error);
}

TEST_CASE("beat period") {
    const AtomSpec atom = default_potassium();
    CHECK(beat_period_fs(atom) == Approx(578.0).epsilon(2.0 / 578.0));
    CHECK(beat_period_fs(atom) == Approx(579.0).epsilon(2e-3));

    // construct a 1 THz splitting: c(1/l1 - 1/l2) = 1e-3 / fs
    AtomSpec one_thz = atom;
    const double l1 = 769.9;
    const double inv_l2 = 1.0 / l1 - 1e-3 / constants::speed_of_light_nm_fs;
    one_thz.excited[0].transition_wavelength_nm = l1;
    one_thz.excited[1].transition_wavelength_nm = 1.0 / inv_l2;
    CHECK(beat_period_fs(one_thz) == Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("beat period times splitting is unity") {
    AtomSpec atom = default_potassium();
    for (double l2 : {766.5, 750.0, 780.0}) {
        atom.excited[1].transition_wavelength_nm = l2;
        const double product = beat_period_fs(atom) * fine_structure_splitting_thz(atom);
        CHECK(product == Approx(1000.0).epsilon(1e-14));  // THz * fs
    }
}

TEST_CASE("default potassium") {
    const AtomSpec atom = default_potassium();
    CHECK_NOTHROW(atom.validate());
    CHECK(atom.excited.size() == 2);
    CHECK(atom.excited[0].transition_wavelength_nm == 769.9);
    CHECK(atom.excited[1].transition_wavelength_nm == 766.5);
    CHECK(atom.excited[0].dipole_weight == 1.0);
    CHECK(atom.excited[1].dipole_weight == Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(atom.probe.d12) ==
          Approx(std::sqrt(atom.probe.d11 * atom.probe.d22)).epsilon(1e-15));
}

TEST_CASE("atom validation rejects bad specs") {
    AtomSpec atom = default_potassium();

    AtomSpec empty = atom;
    empty.excited.clear();
    CHECK_THROWS_AS(empty.validate(), config_error);

    AtomSpec negative = atom;
    negative.excited[0].dipole_weight = -1.0;
    CHECK_THROWS_AS(negative.validate(), config_error);

    AtomSpec no_reference = atom;
    no_reference.excited[0].dipole_weight = 0.7;
    CHECK_THROWS_AS(no_reference.validate(), config_error);

    AtomSpec duplicate = atom;
    duplicate.excited[1].transition_wavelength_nm = duplicate.excited[0].transition_wavelength_nm;
    CHECK_THROWS_AS(duplicate.validate(), config_error);

    AtomSpec bad_probe = atom;
    bad_probe.probe.d12 = {2.0, 0.0};  // exceeds sqrt(d11 d22) = 1
    CHECK_THROWS_AS(bad_probe.validate(), config_error);
}

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "pap/errors.hpp"
#include "pap/observables.hpp"

using namespace pap;
using doctest::Approx;

namespace {

const AtomSpec kAtom = default_potassium();
const double kSplit = fine_structure_splitting_thz(kAtom);    // ~1.7272 THz
const double kPeriod = beat_period_fs(kAtom);                 // ~578.96 fs

FinalState equal_superposition(double phase2 = 0.0) {
    const double a = std::sqrt(0.5);
    return FinalState{{a, 0.0}, std::polar(a, phase2), 0.0};
}

}  // namespace

TEST_CASE("ion signal of a single level is delay independent") {
    const FinalState state{{1.0, 0.0}, {0.0, 0.0}, 0.0};
    const double s0 = ion_signal(state, kAtom, 100.0);
    const double s1 = ion_signal(state, kAtom, 5000.0);
    CHECK(s0 == Approx(1.0).epsilon(1e-12));  // |eps1|^2 d11
    CHECK(s0 == Approx(s1).epsilon(1e-12));
    CHECK_THROWS_AS(ion_signal(state, kAtom, -1.0), config_error);
}

TEST_CASE("equal superposition beats at the splitting with unit contrast") {
    const FinalState state = equal_superposition();
    const BeatTrace trace = beat_trace(state, kAtom, 0.0, 4.0 * kPeriod, 256);
    const BeatAnalysis fit = analyze_beat(trace, kSplit);
    CHECK(fit.has_beat);
    CHECK(fit.frequency_thz == Approx(kSplit).epsilon(5e-3));
    CHECK(fit.contrast == Approx(1.0).epsilon(1e-6));
    CHECK(fit.mean_level == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("pi phase inverts the trace about its mean") {
    const BeatTrace a = beat_trace(equal_superposition(0.0), kAtom, 0.0, 4.0 * kPeriod, 256);
    const BeatTrace b =
        beat_trace(equal_superposition(constants::pi), kAtom, 0.0, 4.0 * kPeriod, 256);
    for (std::size_t i = 0; i < a.signal.size(); ++i)
        CHECK(a.signal[i] + b.signal[i] == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("beat trace sampling") {
    const FinalState single{{1.0, 0.0}, {0.0, 0.0}, 0.0};
    const BeatTrace flat = beat_trace(single, kAtom, 0.0, 3.0 * kPeriod, 128);
    for (double s : flat.signal) CHECK(s == Approx(flat.signal.front()).epsilon(1e-12));

    // ~16 samples per period is the floor
    CHECK_THROWS_AS(beat_trace(equal_superposition(), kAtom, 0.0, 10.0 * kPeriod, 80),
                    numeric_error);

    // three periods starting off-peak show exactly three maxima
    const BeatTrace three =
        beat_trace(equal_superposition(0.5 * constants::pi), kAtom, 0.0, 3.0 * kPeriod, 480);
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < three.signal.size(); ++i)
        if (three.signal[i] >= three.signal[i - 1] && three.signal[i] > three.signal[i + 1])
            ++maxima;
    CHECK(maxima == 3);
}

TEST_CASE("potassium trace over 4 ps spans about 6.9 periods") {
    const BeatTrace trace = beat_trace(equal_superposition(), kAtom, 0.0, 4000.0, 512);
    const BeatAnalysis fit = analyze_beat(trace, kSplit);
    CHECK(4000.0 * fit.frequency_thz / 1000.0 == Approx(6.9).epsilon(0.01));
}

TEST_CASE("analyze_beat on constructed traces") {
    SUBCASE("offset sinusoid") {
        BeatTrace trace;
        const double f = 1.73e-3;  // 1/fs
        for (int i = 0; i < 300; ++i) {
            const double tau = 10.0 * i;
            trace.delays.push_back(tau);
            trace.signal.push_back(1.0 + 0.5 * std::sin(2.0 * constants::pi * f * tau));
        }
        const BeatAnalysis fit = analyze_beat(trace, 1.73);
        CHECK(fit.has_beat);
        CHECK(fit.contrast == Approx(0.5).epsilon(1e-6));
        CHECK(fit.frequency_thz == Approx(1.73).epsilon(1e-4));
        CHECK(fit.amplitude == Approx(0.5).epsilon(1e-6));
    }

    SUBCASE("flat trace reports no beat") {
        BeatTrace trace;
        for (int i = 0; i < 300; ++i) {
            trace.delays.push_back(10.0 * i);
            trace.signal.push_back(0.7);
        }
        const BeatAnalysis fit = analyze_beat(trace, 1.73);
        CHECK_FALSE(fit.has_beat);
        CHECK(fit.contrast == 0.0);
    }

    SUBCASE("too short a span is rejected") {
        const BeatTrace trace = beat_trace(equal_superposition(), kAtom, 0.0, 2.0 * kPeriod, 128);
        CHECK_THROWS_AS(analyze_beat(trace, kSplit), numeric_error);
    }
}

TEST_CASE("extracted phase matches the state phase") {
    for (double phi : {0.0, 0.7, -2.1, 2.9}) {
        const BeatTrace trace =
            beat_trace(equal_superposition(phi), kAtom, 0.0, 4.0 * kPeriod, 256);
        const BeatAnalysis fit = analyze_beat(trace, kSplit);
        // phi12 = arg(b1* b2 d12); d12 = 1 here
        CHECK(std::cos(fit.phase - phi) == Approx(1.0).epsilon(2e-4));  // within 0.02 rad
    }
}

TEST_CASE("phase shift on b2 moves the extracted phase by the same amount") {
    const BeatAnalysis base =
        analyze_beat(beat_trace(equal_superposition(0.3), kAtom, 0.0, 4.0 * kPeriod, 256), kSplit);
    for (double theta : {0.5, 1.2, -0.9}) {
        const BeatAnalysis moved = analyze_beat(
            beat_trace(equal_superposition(0.3 + theta), kAtom, 0.0, 4.0 * kPeriod, 256), kSplit);
        CHECK(std::cos(moved.phase - base.phase - theta) == Approx(1.0).epsilon(2e-4));
    }
}

TEST_CASE("probe scaling leaves contrast and phase alone") {
    AtomSpec scaled = kAtom;
    scaled.probe.amp1 *= 3.0;
    scaled.probe.amp2 *= 3.0;
    const BeatTrace a = beat_trace(equal_superposition(0.4), kAtom, 0.0, 4.0 * kPeriod, 256);
    const BeatTrace b = beat_trace(equal_superposition(0.4), scaled, 0.0, 4.0 * kPeriod, 256);
    for (std::size_t i = 0; i < a.signal.size(); ++i)
        CHECK(b.signal[i] == Approx(9.0 * a.signal[i]).epsilon(1e-12));
    const BeatAnalysis fa = analyze_beat(a, kSplit);
    const BeatAnalysis fb = analyze_beat(b, kSplit);
    CHECK(fa.contrast == Approx(fb.contrast).epsilon(1e-9));
    CHECK(std::cos(fa.phase - fb.phase) == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ion signal positivity for physical probes") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        AtomSpec atom = kAtom;
        atom.probe.d11 = uni(rng);
        atom.probe.d22 = uni(rng);
        atom.probe.amp1 = std::polar(0.2 + uni(rng), 2.0 * constants::pi * uni(rng));
        atom.probe.amp2 = std::polar(0.2 + uni(rng), 2.0 * constants::pi * uni(rng));
        atom.probe.d12 = std::polar(std::sqrt(atom.probe.d11 * atom.probe.d22) * uni(rng),
                                    2.0 * constants::pi * uni(rng));
        const double p1 = uni(rng);
        const FinalState state{std::polar(std::sqrt(p1), 2.0 * constants::pi * uni(rng)),
                               std::polar(std::sqrt(1.0 - p1), 2.0 * constants::pi * uni(rng)),
                               0.0};
        for (double tau : {0.0, 137.0, 489.5, 2040.0})
            CHECK(ion_signal(state, atom, tau) >= -1e-12);
    }
}

TEST_CASE("trace power spectrum") {
    SUBCASE("flat trace is empty") {
        const FinalState single{{1.0, 0.0}, {0.0, 0.0}, 0.0};
        const BeatTrace flat = beat_trace(single, kAtom, 0.0, 4000.0, 512);
        const BeatTrace full = beat_trace(equal_superposition(), kAtom, 0.0, 4000.0, 512);
        double ref = 0.0;
        for (const auto& [f, p] : trace_power_spectrum(full)) ref = std::max(ref, p);
        for (const auto& [f, p] : trace_power_spectrum(flat)) CHECK(p <= 1e-12 * ref);
    }

    SUBCASE("full contrast beat peaks at the splitting") {
        const BeatTrace trace = beat_trace(equal_superposition(), kAtom, 0.0, 6000.0, 1024);
        const auto spectrum = trace_power_spectrum(trace);
        double fpk = 0.0, ppk = 0.0;
        for (const auto& [f, p] : spectrum)
            if (p > ppk) {
                ppk = p;
                fpk = f;
            }
        const double bin = spectrum[1].first - spectrum[0].first;
        CHECK(std::abs(fpk - kSplit) <= bin);
    }

    SUBCASE("two synthetic tones both appear") {
        BeatTrace trace;
        for (int i = 0; i < 600; ++i) {
            const double tau = 10.0 * i;
            trace.delays.push_back(tau);
            trace.signal.push_back(2.0 + std::sin(2e-3 * constants::pi * tau) +
                                   0.8 * std::sin(7e-3 * constants::pi * tau));
        }
        const auto spectrum = trace_power_spectrum(trace);
        CHECK(spectrum_peak_power(spectrum, 1.0, 0.15) > 100.0 * spectrum_peak_power(spectrum, 2.2, 0.15));
        CHECK(spectrum_peak_power(spectrum, 3.5, 0.15) > 100.0 * spectrum_peak_power(spectrum, 2.2, 0.15));
    }

    SUBCASE("needs 64 samples") {
        const BeatTrace trace = beat_trace(equal_superposition(), kAtom, 0.0, 2.0 * kPeriod, 63);
        CHECK_THROWS_AS(trace_power_spectrum(trace), numeric_error);
    }
}

TEST_CASE("excited populations above one are rejected") {
    const FinalState bad{{1.0, 0.0}, {0.5, 0.0}, 0.0};
    CHECK_THROWS_AS(ion_signal(bad, kAtom, 10.0), numeric_error);
}

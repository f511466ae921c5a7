#ifndef PAP_SPECTRAL_HPP
#define PAP_SPECTRAL_HPP

#include <complex>
#include <optional>
#include <vector>

#include "pap/atom.hpp"

namespace pap {

// Uniform angular-frequency grid, omega = omega_min + i*domega,
// i = 0 .. n_points-1. n_points must be a power of two >= 4096.
struct SpectralGrid {
    double omega_min = 0.0;   // rad/fs
    double omega_max = 0.0;   // rad/fs
    int n_points = 0;

    double span() const { return omega_max - omega_min; }
    double domega() const { return span() / n_points; }
    double omega(int i) const { return omega_min + domega() * i; }
    double wavelength(int i) const;      // nm
    double dt() const;                   // temporal sample spacing, fs
    double time_window() const;          // n_points * dt(), fs
    double lambda_min() const;           // shortest wavelength on the grid, nm
    double lambda_max() const;           // longest wavelength on the grid, nm

    void validate() const;               // throws config_error
    bool contains_wavelength(double nm) const;
};

// Grid from a wavelength interval [lambda_min_nm, lambda_max_nm].
SpectralGrid make_grid_nm(double lambda_min_nm, double lambda_max_nm, int n_points);

// Complex field amplitude per grid bin (arbitrary units).
struct SpectralField {
    SpectralGrid grid;
    std::vector<std::complex<double>> amplitude;
};

// One Gaussian amplitude window of the shaper mask. Widths are intensity
// FWHM in nm; the Gaussian profile is taken in wavelength so that the
// half-maximum points sit exactly at center +- fwhm/2.
struct WindowSpec {
    double center_nm = 0.0;
    double fwhm_nm = 0.0;
    double rel_amplitude = 1.0;
    double chirp_fs2 = 0.0;     // quadratic spectral phase coefficient alpha
    double phase_rad = 0.0;     // constant phase offset
    double delay_fs = 0.0;      // group delay of the window (positive = later)
};

struct ShapeSpec {
    std::vector<WindowSpec> windows;
    std::optional<double> pixel_width_nm;  // SLM pixelization, if any
};

// Complex temporal envelope relative to a carrier. envelope[m] is the field
// at t = t_start + m*dt; the physical spectral component at omega appears
// in the envelope as exp(+i*(omega - carrier)*t).
struct TemporalField {
    double t_start = 0.0;   // fs
    double dt = 0.0;        // fs
    std::vector<std::complex<double>> envelope;
    double carrier = 0.0;   // rad/fs
    double amplitude_scale = 1.0;  // global field multiplier applied by the engine

    double t_end() const { return t_start + dt * (static_cast<double>(envelope.size()) - 1.0); }
};

// Gaussian source spectrum: unit peak amplitude, flat phase, intensity FWHM
// fwhm_nm centered at center_nm. Requires center +- 2*fwhm inside the grid.
SpectralField source_spectrum(const SpectralGrid& grid, double center_nm, double fwhm_nm);

// Multiplies the field by the coherent sum of all window masks:
//   sum_k a_k G_k(lambda) exp(i[alpha_k/2 (w-w_k)^2 + theta_k - (w-w_k) T_k])
// Overlapping windows add as complex masks. Applies pixelization afterwards
// when shape.pixel_width_nm is set.
SpectralField apply_shape(const SpectralField& field, const ShapeSpec& shape);

// Replaces the amplitude by its piecewise-constant mean over contiguous
// wavelength bins of the given width.
SpectralField pixelize(const SpectralField& field, double pixel_width_nm);

// Inverse DFT of the spectrum referenced to the carrier, on the time grid
// t in [-T/2, T/2), T = 2*pi/domega. Checks Parseval (1e-10 relative) and
// that the envelope has decayed below 1e-4 of its peak at both window ends.
TemporalField synthesize(const SpectralField& field, double carrier);

// Median spacing between consecutive local maxima of |envelope| above 10%
// of the global peak (sub-sample parabolic refinement). Throws numeric_error
// when fewer than two such maxima exist.
double train_spacing(const TemporalField& field);

// Energies used by the Parseval invariant: (1/2pi) int |amp|^2 dw and
// int |envelope|^2 dt.
double spectral_energy(const SpectralField& field);
double temporal_energy(const TemporalField& field);

}  // namespace pap

#endif

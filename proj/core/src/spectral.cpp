#include "pap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pap/errors.hpp"
#include "fft_util.hpp"

namespace pap {

namespace {

constexpr double two_pi = 2.0 * constants::pi;
constexpr double ln2 = 0.6931471805599453;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Unit-peak amplitude Gaussian whose intensity FWHM is fwhm_nm.
double gauss_amp(double lambda_nm, double center_nm, double fwhm_nm) {
    const double u = (lambda_nm - center_nm) / fwhm_nm;
    return std::exp(-2.0 * ln2 * u * u);
}

}  // namespace

double SpectralGrid::wavelength(int i) const { return two_pi * constants::speed_of_light_nm_fs / omega(i); }
double SpectralGrid::dt() const { return two_pi / span(); }
double SpectralGrid::time_window() const { return n_points * dt(); }
double SpectralGrid::lambda_min() const { return two_pi * constants::speed_of_light_nm_fs / omega_max; }
double SpectralGrid::lambda_max() const { return two_pi * constants::speed_of_light_nm_fs / omega_min; }

void SpectralGrid::validate() const {
    if (!(omega_min > 0.0) || !(omega_min < omega_max))
        throw config_error("grid: need 0 < omega_min < omega_max");
    if (n_points < 4096 || !is_power_of_two(n_points))
        throw config_error("grid: n_points must be a power of two >= 4096, got " +
                           std::to_string(n_points));
}

bool SpectralGrid::contains_wavelength(double nm) const {
    return nm >= lambda_min() && nm <= lambda_max();
}

SpectralGrid make_grid_nm(double lambda_min_nm, double lambda_max_nm, int n_points) {
    if (!(lambda_min_nm > 0.0) || !(lambda_min_nm < lambda_max_nm))
        throw config_error("grid: need 0 < lambda_min < lambda_max");
    SpectralGrid g{angular_frequency(lambda_max_nm), angular_frequency(lambda_min_nm), n_points};
    g.validate();
    return g;
}

SpectralField source_spectrum(const SpectralGrid& grid, double center_nm, double fwhm_nm) {
    grid.validate();
    if (!(fwhm_nm > 0.0))
        throw config_error("source_spectrum: fwhm must be positive");
    // only the center is required inside: an arbitrarily wide source is the
    // legitimate flat-spectrum limit
    if (!grid.contains_wavelength(center_nm))
        throw config_error("source_spectrum: center wavelength outside the grid");
    SpectralField field{grid, std::vector<std::complex<double>>(grid.n_points)};
    for (int i = 0; i < grid.n_points; ++i)
        field.amplitude[i] = gauss_amp(grid.wavelength(i), center_nm, fwhm_nm);
    return field;
}

SpectralField apply_shape(const SpectralField& field, const ShapeSpec& shape) {
    const SpectralGrid& grid = field.grid;
    if (shape.windows.empty())
        throw config_error("apply_shape: shape has no windows");
    for (std::size_t k = 0; k < shape.windows.size(); ++k) {
        const WindowSpec& win = shape.windows[k];
        const std::string at = "shape.windows[" + std::to_string(k) + "]";
        if (!(win.fwhm_nm > 0.0)) throw config_error(at + ": fwhm must be positive");
        if (win.rel_amplitude < 0.0) throw config_error(at + ": rel_amplitude must be >= 0");
        if (!grid.contains_wavelength(win.center_nm - 2.0 * win.fwhm_nm) ||
            !grid.contains_wavelength(win.center_nm + 2.0 * win.fwhm_nm))
            throw config_error(at + ": window support (center +- 2*fwhm) outside the grid");
        if (grid.time_window() < 2.0 * std::abs(win.delay_fs))
            throw config_error(at + ": requested delay " + std::to_string(win.delay_fs) +
                               " fs exceeds half the implied time window " +
                               std::to_string(grid.time_window()) + " fs");
    }

    SpectralField out{grid, std::vector<std::complex<double>>(grid.n_points)};
    for (int i = 0; i < grid.n_points; ++i) {
        const double lam = grid.wavelength(i);
        const double w = grid.omega(i);
        std::complex<double> mask{0.0, 0.0};
        for (const WindowSpec& win : shape.windows) {
            const double wk = angular_frequency(win.center_nm);
            const double dw = w - wk;
            // positive delay shifts the synthesized pulse to later times
            // under the +i envelope kernel used by synthesize()
            const double phase = 0.5 * win.chirp_fs2 * dw * dw + win.phase_rad - dw * win.delay_fs;
            mask += win.rel_amplitude * gauss_amp(lam, win.center_nm, win.fwhm_nm) *
                    std::polar(1.0, phase);
        }
        out.amplitude[i] = field.amplitude[i] * mask;
    }
    if (shape.pixel_width_nm) return pixelize(out, *shape.pixel_width_nm);
    return out;
}

SpectralField pixelize(const SpectralField& field, double pixel_width_nm) {
    const SpectralGrid& grid = field.grid;
    if (!(pixel_width_nm > 0.0))
        throw config_error("pixelize: pixel width must be positive");
    // narrowest wavelength step of the omega grid occurs at the blue end
    const double min_bin_nm =
        grid.wavelength(grid.n_points - 2) - grid.wavelength(grid.n_points - 1);
    if (pixel_width_nm < min_bin_nm)
        throw config_error("pixelize: pixel width " + std::to_string(pixel_width_nm) +
                           " nm is narrower than a grid bin (" + std::to_string(min_bin_nm) + " nm)");

    const double lambda0 = grid.lambda_min();
    SpectralField out{grid, std::vector<std::complex<double>>(grid.n_points)};
    // bins are contiguous in wavelength; grid index runs opposite to wavelength
    int i = grid.n_points - 1;  // longest wavelength first
    while (i >= 0) {
        const auto pix = static_cast<long long>(std::floor((grid.wavelength(i) - lambda0) / pixel_width_nm));
        int j = i;
        std::complex<double> sum{0.0, 0.0};
        while (j >= 0 &&
               static_cast<long long>(std::floor((grid.wavelength(j) - lambda0) / pixel_width_nm)) == pix) {
            sum += field.amplitude[j];
            --j;
        }
        const std::complex<double> mean = sum / static_cast<double>(i - j);
        for (int m = i; m > j; --m) out.amplitude[m] = mean;
        i = j;
    }
    return out;
}

TemporalField synthesize(const SpectralField& field, double carrier) {
    const SpectralGrid& grid = field.grid;
    grid.validate();
    const int n = grid.n_points;
    if (static_cast<int>(field.amplitude.size()) != n)
        throw config_error("synthesize: amplitude size does not match grid");
    if (carrier < grid.omega_min || carrier > grid.omega_max)
        throw config_error("synthesize: carrier outside the grid");

    double peak_spec = 0.0;
    for (const auto& a : field.amplitude) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw numeric_error("synthesize: non-finite spectral amplitude");
        peak_spec = std::max(peak_spec, std::abs(a));
    }
    if (peak_spec == 0.0)
        throw config_error("synthesize: field is identically zero");

    const double domega = grid.domega();
    const double dt = grid.dt();
    const double t_start = -0.5 * grid.time_window();

    // envelope(t_m) = (domega/2pi) sum_k amp_k exp(+i (omega_k - carrier) t_m)
    std::vector<std::complex<double>> pre(n);
    for (int k = 0; k < n; ++k)
        pre[k] = field.amplitude[k] * std::polar(1.0, k * domega * t_start);
    std::vector<std::complex<double>> idft = detail::fft_inverse(pre);

    TemporalField out;
    out.t_start = t_start;
    out.dt = dt;
    out.carrier = carrier;
    out.envelope.resize(n);
    const double scale = domega / two_pi * n;  // undo the 1/N of the inverse FFT
    for (int m = 0; m < n; ++m) {
        const double t = t_start + m * dt;
        out.envelope[m] = scale * idft[m] * std::polar(1.0, (grid.omega_min - carrier) * t);
    }

    const double es = spectral_energy(field);
    const double et = temporal_energy(out);
    if (std::abs(es - et) > 1e-10 * std::max(es, et))
        throw numeric_error("synthesize: Parseval violation, spectral " + std::to_string(es) +
                            " vs temporal " + std::to_string(et));

    double peak = 0.0;
    for (const auto& e : out.envelope) peak = std::max(peak, std::abs(e));
    const double edge = std::max(std::abs(out.envelope.front()), std::abs(out.envelope.back()));
    if (edge > 1e-4 * peak)
        throw numeric_error("synthesize: envelope wraps around the time window (edge/peak = " +
                            std::to_string(edge / peak) + "); increase grid n_points to at least " +
                            std::to_string(2 * n) + " or reduce delays");
    return out;
}

double train_spacing(const TemporalField& field) {
    const auto& env = field.envelope;
    const int n = static_cast<int>(env.size());
    if (n < 3) throw numeric_error("train_spacing: envelope too short");

    std::vector<double> mag(n);
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
        mag[i] = std::abs(env[i]);
        peak = std::max(peak, mag[i]);
    }
    const double floor = 0.1 * peak;
    std::vector<double> peak_times;
    for (int i = 1; i + 1 < n; ++i) {
        if (mag[i] > floor && mag[i] >= mag[i - 1] && mag[i] > mag[i + 1]) {
            // parabolic sub-sample refinement
            const double denom = mag[i - 1] - 2.0 * mag[i] + mag[i + 1];
            const double shift = denom != 0.0 ? 0.5 * (mag[i - 1] - mag[i + 1]) / denom : 0.0;
            peak_times.push_back(field.t_start + (i + shift) * field.dt);
        }
    }
    if (peak_times.size() < 2)
        throw numeric_error("train_spacing: fewer than two envelope maxima above 10% of peak; not a pulse train");
    std::vector<double> gaps(peak_times.size() - 1);
    for (std::size_t i = 0; i + 1 < peak_times.size(); ++i)
        gaps[i] = peak_times[i + 1] - peak_times[i];
    std::sort(gaps.begin(), gaps.end());
    const std::size_t m = gaps.size();
    return m % 2 == 1 ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
}

double spectral_energy(const SpectralField& field) {
    double sum = 0.0;
    for (const auto& a : field.amplitude) sum += std::norm(a);
    return sum * field.grid.domega() / two_pi;
}

double temporal_energy(const TemporalField& field) {
    double sum = 0.0;
    for (const auto& e : field.envelope) sum += std::norm(e);
    return sum * field.dt;
}

}  // namespace pap

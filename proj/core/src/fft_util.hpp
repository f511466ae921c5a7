#ifndef PAP_FFT_UTIL_HPP
#define PAP_FFT_UTIL_HPP

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace pap::detail {

// Thin wrappers around Eigen's FFT (kissfft backend). A fresh FFT object per
// call keeps these safe for concurrent use from multiple threads.

// X[k] = sum_m x[m] exp(-2*pi*i*k*m/N)
inline std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& x) {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.fwd(out, x);
    return out;
}

// x[m] = (1/N) sum_k X[k] exp(+2*pi*i*k*m/N)
inline std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& x) {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.inv(out, x);
    return out;
}

}  // namespace pap::detail

#endif

#include "psd/fft.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "psd/error.hpp"

namespace psd {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_radix2(Eigen::VectorXcd& a, bool inverse) {
  const auto n = static_cast<std::size_t>(a.size());
  if (n == 0 || (n & (n - 1)) != 0) throw DataError("radix-2 FFT needs a power-of-two size");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[static_cast<Eigen::Index>(i)], a[static_cast<Eigen::Index>(j)]);
  }
  // Twiddles from sin/cos of the full-size table: no accumulated recurrence
  // error across stages.
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto u = a[static_cast<Eigen::Index>(i + k)];
        const auto v = a[static_cast<Eigen::Index>(i + k + half)] * tw[k * stride];
        a[static_cast<Eigen::Index>(i + k)] = u + v;
        a[static_cast<Eigen::Index>(i + k + half)] = u - v;
      }
    }
  }
}

Eigen::VectorXcd dft(const Eigen::VectorXcd& x) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n == 0) return {};
  if ((n & (n - 1)) == 0) {
    Eigen::VectorXcd a = x;
    fft_radix2(a);
    return a;
  }
  // Bluestein: nk = (n^2 + k^2 - (k-n)^2) / 2.
  const std::size_t m = next_pow2(2 * n - 1);
  Eigen::VectorXcd chirp(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t sq = (i * i) % (2 * n);
    const double ang = std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n);
    chirp[static_cast<Eigen::Index>(i)] = std::complex<double>(std::cos(ang), -std::sin(ang));
  }
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    a[ii] = x[ii] * chirp[ii];
    b[ii] = std::conj(chirp[ii]);
    if (i > 0) b[static_cast<Eigen::Index>(m - i)] = std::conj(chirp[ii]);
  }
  fft_radix2(a);
  fft_radix2(b);
  a = a.cwiseProduct(b);
  fft_radix2(a, true);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out[kk] = a[kk] / static_cast<double>(m) * chirp[kk];
  }
  return out;
}

Eigen::VectorXcd dft(const Eigen::VectorXd& x) { return dft(Eigen::VectorXcd(x.cast<std::complex<double>>())); }

Eigen::VectorXcd padded_fft(const Eigen::VectorXd& x, std::size_t size) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size));
  a.head(x.size()) = x.cast<std::complex<double>>();
  fft_radix2(a);
  return a;
}

FftConvolver::FftConvolver(const Eigen::VectorXd& kernel, Eigen::Index signal_length)
    : size_(next_pow2(static_cast<std::size_t>(signal_length + kernel.size() - 1))),
      length_(signal_length),
      kernel_length_(kernel.size()) {
  if (kernel.size() == 0 || signal_length == 0) throw DataError("empty convolution operand");
  spectrum_ = padded_fft(kernel, size_);
}

Eigen::VectorXd FftConvolver::apply_spectrum(const Eigen::VectorXcd& signal_spectrum) const {
  Eigen::VectorXcd prod = signal_spectrum.cwiseProduct(spectrum_);
  fft_radix2(prod, true);
  const Eigen::Index offset = (kernel_length_ - 1) / 2;
  Eigen::VectorXd out(length_);
  const double scale = 1.0 / static_cast<double>(size_);
  for (Eigen::Index i = 0; i < length_; ++i) out[i] = prod[i + offset].real() * scale;
  return out;
}

Eigen::VectorXd FftConvolver::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != length_) throw DataError("convolver built for a different signal length");
  return apply_spectrum(padded_fft(x, size_));
}

Eigen::VectorXd convolve_same(const Eigen::VectorXd& x, const Eigen::VectorXd& kernel) {
  return FftConvolver(kernel, x.size())(x);
}

}  // namespace psd

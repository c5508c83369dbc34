#pragma once

#include <complex>

#include <Eigen/Dense>

namespace psd {

/// In-place radix-2 FFT; the size must be a power of two. The inverse is
/// unscaled (divide by n yourself).
void fft_radix2(Eigen::VectorXcd& a, bool inverse = false);

/// Exact N-point DFT X_k = sum_t x_t exp(-2 pi i k t / N) for any N:
/// radix-2 when N is a power of two, Bluestein's chirp-z otherwise.
Eigen::VectorXcd dft(const Eigen::VectorXcd& x);
Eigen::VectorXcd dft(const Eigen::VectorXd& x);

std::size_t next_pow2(std::size_t n);

/// "Same" convolution: full linear convolution of x with kernel, cropped to
/// x.size() samples starting at offset (kernel.size() - 1) / 2. FFT-based.
Eigen::VectorXd convolve_same(const Eigen::VectorXd& x, const Eigen::VectorXd& kernel);

/// Same-convolution against a fixed kernel for signals of a fixed length,
/// with the kernel spectrum computed once.
class FftConvolver {
 public:
  FftConvolver(const Eigen::VectorXd& kernel, Eigen::Index signal_length);
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  /// Multiply a precomputed signal spectrum (size fft_size()) and crop.
  Eigen::VectorXd apply_spectrum(const Eigen::VectorXcd& signal_spectrum) const;
  std::size_t fft_size() const { return size_; }
  Eigen::Index signal_length() const { return length_; }
  Eigen::Index kernel_length() const { return kernel_length_; }

 private:
  Eigen::VectorXcd spectrum_;
  std::size_t size_;
  Eigen::Index length_;
  Eigen::Index kernel_length_;
};

/// Zero-padded forward transform of a real signal to `size` points.
Eigen::VectorXcd padded_fft(const Eigen::VectorXd& x, std::size_t size);

}  // namespace psd

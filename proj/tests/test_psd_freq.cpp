#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "psd/fft.hpp"
#include "psd/freq_domain.hpp"

using namespace psd;
using testutil::rel_err;
using testutil::vec;

namespace {

Eigen::VectorXcd naive_dft(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<long double> acc = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * t) % n) / n;
      acc += static_cast<long double>(x[t]) * std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    out[k] = std::complex<double>(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
  }
  return out;
}

double weighted_abs(const Eigen::VectorXd& w) {
  double s = 0;
  for (Eigen::Index t = 0; t < w.size(); ++t) s += std::abs(static_cast<double>(t) * w[t]);
  return s;
}

}  // namespace

TEST_CASE("dft matches the naive transform for every length") {
  Rng rng(2);
  for (Eigen::Index n = 1; n <= 70; ++n) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
    const Eigen::VectorXcd fast = dft(x), slow = naive_dft(x);
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, slow.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("convolve_same matches direct convolution") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 5 + trial * 7, m = 1 + trial % 13;
    Eigen::VectorXd x(n), k(m);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
    for (Eigen::Index i = 0; i < m; ++i) k[i] = rng.normal();
    const Eigen::VectorXd a = convolve_same(x, k), b = oracle::direct_convolve_same(x, k);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    const FftConvolver plan(k, n);
    CHECK((plan(x) - b).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("DFT ratio") {
  CHECK(dft_factor(vec({1})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(dft_factor(vec({0, 0, 0})), DataError);

  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = testutil::random_pulse(rng, 64 + i % 37);
    CHECK(rel_err(dft_energy(v), static_cast<double>(v.size()) * v.squaredNorm()) < 1e-9);
  }
}

TEST_CASE("frequency gradient") {
  for (double c : {0.5, 1.0, 3.0}) {
    CHECK(fga_factor(Eigen::VectorXd::Constant(4, c)) == doctest::Approx(16 * c).epsilon(1e-12));
  }
  CHECK(fga_factor(Eigen::VectorXd::Zero(8)) == 0.0);
  CHECK(fga_factor(Eigen::VectorXd::Constant(4, 2.0), 2.0) == doctest::Approx(16.0).epsilon(1e-12));

  const Eigen::VectorXd sine = vec({0, 1, 0, -1});
  // literal: |cos sum| - sin sum = 0 - 2; magnitude: |X1| = 2
  CHECK(fga_factor(sine, 1.0, FgaVariant::Literal) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(fga_factor(sine, 1.0, FgaVariant::Magnitude) == doctest::Approx(8.0).epsilon(1e-12));
  const Eigen::VectorXd shifted = vec({1, 2, 1, 0});
  CHECK(fga_factor(shifted, 1.0, FgaVariant::Literal) == doctest::Approx(4 * std::abs(4.0 - (0.0 - 2.0))).epsilon(1e-12));
  CHECK(fga_factor(shifted, 1.0, FgaVariant::Magnitude) == doctest::Approx(4 * std::abs(4.0 - 2.0)).epsilon(1e-12));

  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = testutil::random_pulse(rng);
    const double c = 0.1 + 5 * rng.uniform();
    CHECK(rel_err(fga_factor(Eigen::VectorXd(c * v)), c * fga_factor(v)) < 1e-9);
  }
}

TEST_CASE("fractal spectrum slope") {
  for (double exponent : {-2.0, -1.3, 0.0, 0.7}) {
    Spectrum sp;
    sp.df = 0.25;
    sp.values.resize(65);
    sp.values[0] = 123.0;
    for (Eigen::Index k = 1; k < sp.values.size(); ++k) sp.values[k] = 5.0 * std::pow(k * sp.df, exponent);
    CHECK(std::abs(spectral_slope(sp) - exponent) < 1e-9);
    CHECK(fs_factor(sp, 2.0, 3.0) == doctest::Approx(1.5 - exponent).epsilon(1e-9));
  }
  Spectrum inv;
  inv.values.resize(40);
  for (Eigen::Index k = 0; k < inv.values.size(); ++k) inv.values[k] = k == 0 ? 0.0 : 1.0 / double(k * k);
  CHECK(fs_factor(inv) == doctest::Approx(3.0).epsilon(1e-12));

  const Spectrum pg = periodogram(vec({1, 2, 3, 4}), 0.5);
  CHECK(pg.values.size() == 3);
  CHECK(pg.df == doctest::Approx(0.5));
  CHECK(pg.values[0] == doctest::Approx(100.0 / 4));
}

TEST_CASE("SDCC") {
  CHECK(sdcc_factor(vec({1, 1})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(sdcc_factor(vec({std::numbers::e})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(sdcc_factor(vec({0, 0})), DataError);
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = testutil::random_pulse(rng);
    const double c = 0.1 + 5 * rng.uniform();
    CHECK(std::abs(sdcc_factor(Eigen::VectorXd(c * v)) - (sdcc_factor(v) + 2 * std::log(c))) < 1e-9);
  }
}

TEST_CASE("wavelet ratios") {
  CHECK_THROWS_AS(wt1_factor(Eigen::VectorXd::Zero(128)), DataError);
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd v = testutil::random_pulse(rng);
    CHECK(wt1_factor(v, 17, 17) == doctest::Approx(1.0).epsilon(1e-15));
    const double num = weighted_abs(oracle::direct_convolve_same(v, haar_wavelet(28)));
    const double den = weighted_abs(oracle::direct_convolve_same(v, haar_wavelet(40)));
    CHECK(rel_err(wt1_factor(v), std::sqrt(num / den)) < 1e-9);

    const double pos = oracle::direct_convolve_same(v, marr_wavelet(4)).cwiseMax(0.0).sum();
    CHECK(rel_err(wt2_factor(v), 2 * v.sum() / (v.sum() + pos)) < 1e-9);
    const double c = 0.1 + 5 * rng.uniform();
    CHECK(rel_err(wt2_factor(Eigen::VectorXd(c * v)), wt2_factor(v)) < 1e-9);
  }
  const Eigen::VectorXd h = haar_wavelet(5);
  CHECK(h.size() == 5);
  CHECK(h[2] == 0.0);
  CHECK(h.squaredNorm() == doctest::Approx(0.8));
  CHECK(marr_wavelet(3).squaredNorm() == doctest::Approx(1.0));
}

TEST_CASE("scalogram discrimination") {
  BinaryGrid all = BinaryGrid::Constant(4, 6, true), none = BinaryGrid::Constant(4, 6, false);
  BinaryGrid mask = BinaryGrid::Constant(4, 6, false);
  mask(1, 2) = true;
  mask(3, 5) = true;
  CHECK(sd_factor(all, mask) == 1.0);
  CHECK(sd_factor(none, mask) == 0.0);
  BinaryGrid one = BinaryGrid::Constant(4, 6, false);
  one(2, 2) = true;
  BinaryGrid b = BinaryGrid::Constant(4, 6, false);
  CHECK(sd_factor(b, one) == 0.0);
  b(2, 2) = true;
  CHECK(sd_factor(b, one) == 1.0);

  Rng rng(14);
  std::vector<Eigen::VectorXd> fast, slow;
  for (int i = 0; i < 40; ++i) {
    Eigen::VectorXd f(96), s(96);
    for (Eigen::Index t = 0; t < 96; ++t) {
      const double x = t < 10 ? 0.0 : (1 - std::exp(-(t - 10.0)));
      f[t] = x * std::exp(-(t - 10.0) / 3) + 0.01 * rng.normal();
      s[t] = x * (std::exp(-(t - 10.0) / 3) + 0.5 * std::exp(-(t - 10.0) / 30)) + 0.01 * rng.normal();
    }
    fast.push_back(f);
    slow.push_back(s);
  }
  const ScalogramMask m = build_scalogram_mask(testutil::make_dataset(slow), testutil::make_dataset(fast), 0.3,
                                               log_scales(20, 1, 32));
  CHECK(m.cells() > 0);
  for (int i = 0; i < 50; ++i) {
    const double f = sd_factor(testutil::random_pulse(rng, 96), m);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
  CHECK_THROWS_AS(build_scalogram_mask(testutil::make_dataset(fast), testutil::make_dataset(fast), 0.3,
                                       log_scales(20, 1, 32)),
                  DataError);

  const std::vector<double> s = log_scales(50, 1, 64);
  CHECK(s.front() == doctest::Approx(1.0));
  CHECK(s.back() == doctest::Approx(64.0));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "psd/time_domain.hpp"

using namespace psd;
using testutil::vec;

namespace {

GateConfig gates(Eigen::Index pre, Eigen::Index shrt, Eigen::Index lng) {
  GateConfig g;
  g.t_pre = pre;
  g.t_short = shrt;
  g.t_long = lng;
  g.t_delay = shrt;
  g.t_total = lng;
  return g;
}

// Gates that fit inside the 128-sample random pulses.
GateConfig small_gates() {
  GateConfig g;
  g.t_pre = 3;
  g.t_short = 8;
  g.t_long = 60;
  g.t_delay = 50;
  g.t_total = 60;
  return g;
}

Eigen::VectorXd linear_edge() {
  // flat 1 up to t=10, linear down to 0 at t=20
  Eigen::VectorXd v = Eigen::VectorXd::Zero(30);
  for (int t = 0; t <= 10; ++t) v[t] = 1.0;
  for (int t = 10; t <= 20; ++t) v[t] = 1.0 - (t - 10) / 10.0;
  return v;
}

}  // namespace

TEST_CASE("charge comparison and charge integration") {
  CHECK(cc_factor(vec({0, 1, 0, 0, 0, 0}), gates(1, 1, 3)) == 0.0);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(20);
  CHECK(cc_factor(ones, gates(2, 2, 6), 5) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  GateConfig ci = gates(2, 2, 6);
  ci.t_delay = 2;
  ci.t_total = 6;
  CHECK(ci_factor(ones, ci, 5) == doctest::Approx(3.0 / 9.0).epsilon(1e-15));

  Eigen::VectorXd delta = Eigen::VectorXd::Zero(10);
  delta[2] = 1;
  CHECK(ci_factor(delta, gates(1, 2, 5)) == 0.0);
  CHECK_THROWS_AS(cc_factor(delta, gates(3, 2, 5)), DataError);
  CHECK_THROWS_AS(cc_factor(delta, gates(1, 5, 5)), ConfigError);
  CHECK_THROWS_AS(cc_factor(Eigen::VectorXd::Zero(10), gates(0, 1, 3)), DataError);
}

TEST_CASE("falling-edge percentage slope") {
  CHECK(feps_factor(linear_edge()) == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(feps_factor(Eigen::VectorXd(3.5 * linear_edge())) == doctest::Approx(-0.1).epsilon(1e-12));
  Eigen::VectorXd truncated = linear_edge().head(15);
  CHECK_THROWS_AS(feps_factor(truncated), DataError);
}

TEST_CASE("Gatti weights and factor") {
  ReferencePair same{vec({1, 0.5, 0.2}), vec({1, 0.5, 0.2})};
  CHECK(gatti_weights(same).isZero());
  CHECK(gatti_factor(vec({0.3, 9, -2}), gatti_weights(same)) == 0.0);

  ReferencePair refs{vec({1, 0}), vec({0, 1})};
  CHECK(gatti_weights(refs) == vec({1, -1}));
  CHECK(gatti_factor(vec({0.7, 0.3}), gatti_weights(refs)) == doctest::Approx(0.4).epsilon(1e-15));

  ReferencePair zeros{vec({0, -1}), vec({0, 0})};
  CHECK(gatti_weights(zeros) == vec({0, 0}));
}

TEST_CASE("log-likelihood ratio") {
  PmfPair equal{vec({0.3, 0.7}), vec({0.3, 0.7}), 1e-6};
  CHECK(llr_factor(vec({5, 2}), equal) == 0.0);
  PmfPair p{vec({0.8, 0.2}), vec({0.2, 0.8}), 1e-6};
  CHECK(llr_factor(vec({1, 0}), p) == doctest::Approx(-std::log(4.0)).epsilon(1e-14));

  const Dataset ds = testutil::make_dataset({vec({1, 0, 0}), vec({0, 1, 0})}, std::vector<Label>{Label::Neutron, Label::Gamma});
  const PmfPair built = build_pmf(ds, 1e-3);
  CHECK(built.pmf_n.minCoeff() >= 1e-3);
  CHECK(built.pmf_n.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isfinite(llr_factor(vec({1, 1, 1}), built)));
}

TEST_CASE("log mean time") {
  CHECK(lmt_factor(vec({0, 1, 0})) == 0.0);
  CHECK(lmt_factor(vec({0, 1, 1})) == doctest::Approx(std::log(1.5)).epsilon(1e-15));
  CHECK_THROWS_AS(lmt_factor(vec({1, 0, 0})), DataError);
}

TEST_CASE("principal component") {
  PrincipalComponent pc;
  pc.w = vec({0.6, 0.8, 0});
  CHECK(pca_factor(pc.w, pc) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pca_factor(vec({0.8, -0.6, 3}), pc) == doctest::Approx(0.0).epsilon(1e-15));

  Eigen::MatrixXd axis(4, 2);
  axis << 1, 0, -1, 0, 3, 0, 2, 0;
  const PrincipalComponent e0 = pca_fit(axis);
  CHECK(std::abs(e0.w[0]) == doctest::Approx(1.0));
  CHECK(std::abs(e0.w[1]) < 1e-12);
  CHECK(pca_factor(vec({-2.5, 7}), e0) == doctest::Approx(2.5));

  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + trial % 2;
    Eigen::MatrixXd mix(dim, dim);
    for (Eigen::Index i = 0; i < mix.size(); ++i) mix.data()[i] = rng.normal();
    Eigen::MatrixXd rows(200, dim);
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      Eigen::VectorXd z(dim);
      for (int d = 0; d < dim; ++d) z[d] = rng.normal() * (d + 1);
      rows.row(r) = (mix * z).transpose();
    }
    const Eigen::MatrixXd c = rows.rowwise() - rows.colwise().mean();
    const Eigen::MatrixXd cov = c.transpose() * c / double(rows.rows() - 1);
    const double lambda = oracle::largest_eigenvalue(cov);
    const Eigen::VectorXd u = oracle::eigenvector_for(cov, lambda);
    const PrincipalComponent fit = pca_fit(rows);
    CHECK(testutil::rel_err(fit.eigenvalue, lambda) < 1e-8);
    CHECK(std::abs(std::abs(fit.w.dot(u)) - 1.0) < 1e-8);
    Eigen::Index big = 0;
    fit.w.cwiseAbs().maxCoeff(&big);
    CHECK(fit.w[big] > 0);
  }
  CHECK_THROWS_AS(pca_fit(Eigen::MatrixXd::Ones(5, 3)), DataError);
}

TEST_CASE("pulse gradient and pattern recognition") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(20);
  v[2] = 1;
  v[12] = 0.5;
  CHECK(pga_factor(v, 10) == doctest::Approx(-0.05).epsilon(1e-15));
  CHECK(pga_factor(Eigen::VectorXd::Constant(20, 0.3), 10) == 0.0);
  CHECK_THROWS_AS(pga_factor(v, 20), DataError);

  CHECK(pr_factor(vec({1, 2, 3}), vec({1, 2, 3})) == doctest::Approx(0.0));
  CHECK(pr_factor(vec({1, 0}), vec({0, 2})) == doctest::Approx(M_PI / 2).epsilon(1e-15));
  CHECK_THROWS_AS(pr_factor(vec({0, 0}), vec({0, 2})), DataError);
}

TEST_CASE("zero crossing") {
  CHECK(zc_factor(vec({1, 0.5, -0.5}), 0.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(zc_factor(vec({1, 0.5, -0.5}), 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(zc_factor(vec({1, 0.5, 0.2}), 0.0), DataError);
  CHECK_THROWS_AS(bipolar_shape(vec({1, 0}), 1.0), ConfigError);

  Rng rng(4);
  const Eigen::VectorXd p = testutil::random_pulse(rng, 256);
  const double t = zc_factor_for_pulse(p);
  CHECK(std::isfinite(t));
  CHECK(t > 0);
}

TEST_CASE("scale laws on random pulses") {
  Rng rng(1234);
  const GateConfig g = small_gates();
  ReferencePair refs;
  {
    Rng r2(99);
    refs.v_n = testutil::random_pulse(r2).cwiseMax(0.0);
    refs.v_gamma = testutil::random_pulse(r2).cwiseMax(0.0);
  }
  const Eigen::VectorXd gw = gatti_weights(refs);
  PmfPair pmfs{(refs.v_n.array() + 1e-3).matrix(), (refs.v_gamma.array() + 1e-3).matrix(), 1e-3};
  pmfs.pmf_n /= pmfs.pmf_n.sum();
  pmfs.pmf_gamma /= pmfs.pmf_gamma.sum();
  const Eigen::VectorXd lw = llr_weights(pmfs);

  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = testutil::random_pulse(rng);
    for (double c : {0.37, 2.5, 1000.0}) {
      const Eigen::VectorXd cv = c * v;
      CHECK(testutil::rel_err(cc_factor(cv, g), cc_factor(v, g)) < 1e-9);
      CHECK(testutil::rel_err(ci_factor(cv, g), ci_factor(v, g)) < 1e-9);
      CHECK(testutil::rel_err(lmt_factor(cv), lmt_factor(v)) < 1e-9);
      CHECK(testutil::rel_err(pr_factor(cv, refs.v_gamma), pr_factor(v, refs.v_gamma)) < 1e-9);
      CHECK(testutil::rel_err(zc_factor_for_pulse(cv), zc_factor_for_pulse(v)) < 1e-9);
      CHECK(testutil::rel_err(feps_factor(cv), feps_factor(v)) < 1e-9);
      CHECK(testutil::rel_err(gatti_factor(cv, gw), c * gatti_factor(v, gw)) < 1e-9);
      CHECK(testutil::rel_err(llr_factor(cv, lw), c * llr_factor(v, lw)) < 1e-9);
      CHECK(testutil::rel_err(pga_factor(cv, 16), c * pga_factor(v, 16)) < 1e-9);
      ++checked;
    }
  }
  CHECK(checked == 3000);
}

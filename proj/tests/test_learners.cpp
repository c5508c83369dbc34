#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "psd/features.hpp"
#include "psd/hybrid.hpp"
#include "psd/knn.hpp"
#include "psd/learners.hpp"
#include "psd/linear.hpp"
#include "psd/metrics.hpp"
#include "psd/mlp.hpp"
#include "psd/model_io.hpp"
#include "psd/synth.hpp"

using namespace psd;
using testutil::vec;

namespace {

const Dataset& small_synthetic() {
  static const Dataset ds = [] {
    SynthParams n = default_neutron_params(), g = default_gamma_params();
    n.seed = 101;
    g.seed = 202;
    return synthesize_dataset(150, 150, n, g);
  }();
  return ds;
}

double accuracy(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return static_cast<double>(hit) / static_cast<double>(a.size());
}

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("feature transforms") {
  const Eigen::VectorXd h = dwt_haar(vec({1, 1, 2, 2}));
  const double r2 = std::numbers::sqrt2;
  CHECK(h.isApprox(vec({r2, 2 * r2, 0, 0}), 1e-15));

  Eigen::VectorXd cosine(32);
  for (Eigen::Index t = 0; t < 32; ++t) cosine[t] = std::cos(2 * std::numbers::pi * double(t) / 32);
  const Eigen::VectorXd mag = fft_magnitude(cosine);
  CHECK(mag.size() == 17);
  CHECK(mag[1] == doctest::Approx(16.0));
  CHECK(mag.sum() - mag[1] < 1e-9);

  Rng rng(1);
  const Eigen::VectorXd v = testutil::random_pulse(rng, 100);
  const Eigen::VectorXd st = stft_magnitude(v, 32, 16);
  CHECK(st.size() == 6 * 17);  // frames start at 0,16,...,80; last one zero padded
  CHECK_THROWS_AS(stft_magnitude(v, 16, 32), ConfigError);

  CHECK(segment_sums(vec({1, 2, 3, 4, 5, 6}), 3) == vec({3, 7, 11}));
  CHECK(cumulative_charge(vec({1, 2, 3, 4, 5, 6}), 3) == vec({3, 10, 21}));
  CHECK(cumulative_charge(v, 6)[5] == doctest::Approx(v.sum()));

  FeatureSpec raw;
  CHECK(extract_features(raw, v) == v);
  FeatureSpec pca;
  pca.kind = FeatureKind::Pca;
  CHECK_THROWS_AS(extract_features(pca, v), ConfigError);
}

TEST_CASE("full-rank PCA preserves inner products") {
  Rng rng(2);
  std::vector<Eigen::VectorXd> rows;
  for (int i = 0; i < 60; ++i) rows.push_back(testutil::random_pulse(rng, 24));
  const Dataset ds = testutil::make_dataset(rows);
  FeatureSpec spec;
  spec.kind = FeatureKind::Pca;
  spec.pca_components = 24;
  spec = fit_features(spec, ds);
  const Eigen::MatrixXd& c = spec.pca->components;
  CHECK((c.transpose() * c - Eigen::MatrixXd::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-9);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd a = testutil::random_pulse(rng, 24), b = testutil::random_pulse(rng, 24);
    const double direct = (a - spec.pca->mean).dot(b - spec.pca->mean);
    const double projected = extract_features(spec, a).dot(extract_features(spec, b));
    worst = std::max(worst, std::abs(direct - projected));
  }
  CHECK(worst < 1e-9);
  const Eigen::MatrixXd feats = extract_features(spec, ds);
  for (Eigen::Index j = 1; j < feats.cols(); ++j) {
    CHECK(feats.col(j - 1).squaredNorm() >= feats.col(j).squaredNorm() * (1 - 1e-12));
  }
}

TEST_CASE("standardizer") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  const Standardizer s = Standardizer::fit(x);
  const Eigen::MatrixXd z = s.transform(x);
  CHECK(z.col(0).mean() == doctest::Approx(0.0));
  CHECK(z.col(1).isZero());
  CHECK(s.scale[1] == 1.0);
}

TEST_CASE("nearest neighbors") {
  Eigen::MatrixXd f(3, 1);
  f << 0.1, 0.2, 0.9;
  const KnnModel m = knn_fit(f, std::vector<Label>{Label::Gamma, Label::Gamma, Label::Neutron}, 3);
  CHECK(knn_classify(m, vec({0.15})) == Label::Gamma);
  const KnnModel m1 = knn_fit(f, std::vector<Label>{Label::Gamma, Label::Gamma, Label::Neutron}, 1);
  CHECK(knn_classify(m1, vec({0.9})) == Label::Neutron);
  const KnnModel reg = knn_fit(f, vec({1, 2, 3}), 3);
  CHECK(knn_regress(reg, vec({-4})) == doctest::Approx(2.0));
  CHECK_THROWS_AS(knn_fit(f, vec({1, 2, 3}), 4), ConfigError);

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 5 + trial % 30, d = 1 + trial % 4;
    const int k = 1 + trial % 5;
    Eigen::MatrixXd x = random_matrix(rng, n, d);
    // integer grid coordinates force distance ties
    if (trial % 3 == 0) x = x.array().round();
    std::vector<Label> labels;
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      labels.push_back(rng.uniform() < 0.5 ? Label::Gamma : Label::Neutron);
      t[i] = rng.normal();
    }
    Eigen::VectorXd q = random_matrix(rng, d, 1);
    if (trial % 3 == 0) q = q.array().round();
    const KnnModel cm = knn_fit(x, labels, k);
    CHECK(knn_classify(cm, q) == oracle::knn_vote(x, labels, q, k));
    const KnnModel rm = knn_fit(x, t, k);
    CHECK(std::abs(knn_regress(rm, q) - oracle::knn_mean(x, t, q, k)) < 1e-12);
  }
}

TEST_CASE("linear and logistic regression") {
  Eigen::MatrixXd x(5, 1);
  x << -2, -1, 0, 1, 2.5;
  const LinearModel line = fit_linear(x, 2 * x.col(0));
  CHECK(std::abs(line.coefficients[0] - 2.0) < 1e-9);
  CHECK(std::abs(line.intercept) < 1e-9);

  Rng rng(4);
  const Eigen::MatrixXd big = random_matrix(rng, 80, 5);
  Eigen::VectorXd y = big * vec({1, -2, 0.5, 3, 0}) + random_matrix(rng, 80, 1);
  const LinearModel fit = fit_linear(big, y);
  const Eigen::VectorXd resid = y - predict(fit, big);
  CHECK((big.transpose() * resid).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(resid.sum()) < 1e-6);

  Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(6, 2);
  constant.col(0) << 1, 2, 3, 4, 5, 6;
  CHECK_THROWS_AS(fit_linear(constant, vec({1, 2, 3, 4, 5, 6})), NumericError);

  Eigen::MatrixXd sep(2, 1);
  sep << -1, 1;
  const std::vector<Label> labels{Label::Gamma, Label::Neutron};
  const LinearModel logit = fit_logistic(sep, labels);
  CHECK(logit.link == Link::Logistic);
  CHECK(predict_label(logit, vec({-1})) == Label::Gamma);
  CHECK(predict_label(logit, vec({1})) == Label::Neutron);
  CHECK(predict(logit, vec({0})) == doctest::Approx(0.5));
}

TEST_CASE("MLP forward pass and presets") {
  MlpModel zero = mlp_init({3, 1}, 1, MlpTask::Classify);
  zero.weights[0].setZero();
  for (int i = 0; i < 5; ++i) CHECK(mlp_predict(zero, vec({double(i), -3.0 * i, 7})) == 0.5);
  CHECK(preset_hidden(MlpPreset::Mlp1).empty());
  CHECK(preset_hidden(MlpPreset::Mlp2) == std::vector<int>{10, 10});
  CHECK(preset_hidden(MlpPreset::Mlp3) == std::vector<int>(7, 64));
  CHECK(preset_dropout(MlpPreset::Mlp2) == doctest::Approx(0.2));
  CHECK(preset_dropout(MlpPreset::Mlp3) == 0.0);
}

TEST_CASE("MLP gradients match central differences") {
  Rng rng(5);
  const Eigen::MatrixXd x = random_matrix(rng, 12, 3);
  for (MlpTask task : {MlpTask::Classify, MlpTask::Regress}) {
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y[i] = task == MlpTask::Classify ? double(i % 2) : rng.normal();
    MlpModel m = mlp_init({3, 4, 1}, 9, task);
    for (auto& b : m.biases) b.setConstant(0.1);
    const MlpGradients g = mlp_gradients(m, x, y);
    const double h = 1e-5;
    double worst = 0;
    auto probe = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = mlp_loss(m, x, y);
      param = keep - h;
      const double down = mlp_loss(m, x, y);
      param = keep;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic) / std::max(1e-3, std::abs(numeric) + std::abs(analytic)));
    };
    for (std::size_t l = 0; l < m.layers(); ++l) {
      for (Eigen::Index i = 0; i < m.weights[l].size(); ++i) probe(m.weights[l].data()[i], g.weights[l].data()[i]);
      for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) probe(m.biases[l][i], g.biases[l][i]);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("MLP learns XOR") {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  const Eigen::VectorXd y = vec({0, 1, 1, 0});
  MlpTrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 5000;
  cfg.batch_size = 4;
  cfg.seed = 3;
  const MlpTrainResult r = mlp_train(mlp_init({2, 8, 8, 1}, 3, MlpTask::Classify), x, y, cfg);
  int correct = 0;
  for (int i = 0; i < 4; ++i) correct += (mlp_predict(r.model, Eigen::VectorXd(x.row(i).transpose())) >= 0.5) == (y[i] == 1);
  CHECK(correct == 4);
}

TEST_CASE("full-batch loss does not increase at a small learning rate") {
  Rng rng(6);
  const Eigen::MatrixXd x = random_matrix(rng, 64, 4);
  Eigen::VectorXd y(64);
  for (int i = 0; i < 64; ++i) y[i] = x(i, 0) + x(i, 1) * x(i, 2) > 0 ? 1 : 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    MlpTrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 200;
    cfg.batch_size = 64;
    cfg.seed = seed;
    const MlpTrainResult r = mlp_train(mlp_init({4, 10, 10, 1}, seed, MlpTask::Classify), x, y, cfg);
    REQUIRE(r.epoch_loss.size() == 200);
    for (std::size_t e = 1; e < r.epoch_loss.size(); ++e) CHECK(r.epoch_loss[e] <= r.epoch_loss[e - 1]);
  }
}

TEST_CASE("divergence is reported with the epoch") {
  Eigen::MatrixXd x(4, 1);
  x << 1e3, -1e3, 2e3, -2e3;
  MlpTrainConfig cfg;
  cfg.learning_rate = 1e6;
  cfg.epochs = 50;
  try {
    mlp_train(mlp_init({1, 8, 1}, 1, MlpTask::Regress), x, vec({1e3, -1e3, 2e3, -2e3}), cfg);
    FAIL("expected divergence");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("learner ids") {
  CHECK(parse_learner("KNN").kind == LearnerKind::Knn);
  CHECK(parse_learner("KNN").features.kind == FeatureKind::SegmentSums);
  CHECK(parse_learner("LOGRE").kind == LearnerKind::Logistic);
  CHECK(parse_learner("LINRE").features.pca_components == 2);
  CHECK(parse_learner("LRSTFT").features.pca_source == FeatureKind::StftMag);
  CHECK(parse_learner("MLP2").features.kind == FeatureKind::CumulativeCharge);
  CHECK(parse_learner("MLP3-FT").features.kind == FeatureKind::FftMag);
  CHECK(parse_learner("MLP1-WT").features.kind == FeatureKind::DwtHaar);
  CHECK(parse_learner("MLP1-STFT").features.kind == FeatureKind::StftMag);
  CHECK(parse_learner("MLP2-PCA").features.kind == FeatureKind::Pca);
  CHECK(parse_learner("MLP2-PCA").preset == MlpPreset::Mlp2);
  CHECK_FALSE(is_learner_id("MLP4"));
  CHECK_FALSE(is_learner_id("CC"));
  CHECK_THROWS_AS(parse_learner("MLP1-XYZ"), ConfigError);
  const KeyValueConfig cfg = KeyValueConfig::parse("[learn]\nknn_k = 7\nepochs = 12\nlr = 0.05\n");
  CHECK(parse_learner("KNN", cfg).k == 7);
  CHECK(parse_learner("MLP1", cfg).mlp.epochs == 12);
  CHECK(parse_learner("MLP1", cfg).mlp.learning_rate == doctest::Approx(0.05));
}

TEST_CASE("classifiers separate synthetic classes and survive a save/load") {
  const Dataset& ds = small_synthetic();
  SplitSpec spec{0.5, 0.5, 0.0, 7, true};
  const DatasetSplit parts = split_dataset(ds, spec);
  const auto dir = testutil::scratch("models");
  KeyValueConfig cfg = KeyValueConfig::parse("[learn]\nepochs = 60\nlr = 0.01\npca_components = 10\n");
  for (const char* id : {"KNN", "LINRE", "LOGRE", "LRSTFT", "MLP1", "MLP2", "MLP1-PCA", "MLP1-WT"}) {
    CAPTURE(id);
    const TrainedLearner model = train_classifier(parse_learner(id, cfg), parts.training, 5);
    const std::vector<Label> pred = model.classify(parts.validation);
    CHECK(accuracy(pred, *parts.validation.labels) > 0.8);

    save_learner(model, dir / (std::string(id) + ".json"));
    const TrainedLearner back = load_learner(dir / (std::string(id) + ".json"));
    const Eigen::VectorXd a = model.score(parts.validation), b = back.score(parts.validation);
    CHECK((a.array() == b.array()).all());
    CHECK(back.spec.id == id);
  }
}

TEST_CASE("model documents are validated") {
  CHECK_THROWS_AS(learner_from_json("not json"), DataError);
  CHECK_THROWS_AS(learner_from_json(R"({"format":"psd-learner","version":99})"), DataError);
  CHECK_THROWS_AS(learner_from_json(R"({"format":"other","version":1})"), DataError);
}

TEST_CASE("regressors recover a linearly representable target") {
  Rng rng(7);
  SynthParams p = default_gamma_params();
  p.noise_sigma = 0.002;
  p.length = 64;
  p.seed = 3;
  const Dataset ds = synthesize_dataset(0, 400, p, p);
  Eigen::VectorXd target(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) target[static_cast<Eigen::Index>(i)] = ds.pulses[i].samples.maxCoeff();
  LearnerSpec spec = parse_learner("LINRE");
  spec.features = FeatureSpec{};
  std::vector<std::size_t> train, held;
  for (std::size_t i = 0; i < ds.size(); ++i) (i % 2 ? held : train).push_back(i);
  Eigen::VectorXd t_train(static_cast<Eigen::Index>(train.size())), t_held(static_cast<Eigen::Index>(held.size()));
  for (std::size_t i = 0; i < train.size(); ++i) t_train[static_cast<Eigen::Index>(i)] = target[static_cast<Eigen::Index>(train[i])];
  for (std::size_t i = 0; i < held.size(); ++i) t_held[static_cast<Eigen::Index>(i)] = target[static_cast<Eigen::Index>(held[i])];
  const TrainedLearner m = train_regressor(spec, ds.subset(train), t_train, 1);
  CHECK(pearson(m.score(ds.subset(held)), t_held) > 0.999);
  CHECK_THROWS_AS(train_regressor(parse_learner("LOGRE"), ds.subset(train), t_train, 1), ConfigError);
}

TEST_CASE("hybrid teacher-student workflow") {
  CHECK(is_hybrid_id("MLP1:CC"));
  CHECK(is_hybrid_id("MLP3-FT:GP"));
  CHECK_FALSE(is_hybrid_id("MLP1"));
  CHECK_FALSE(is_hybrid_id("MLP1:NOPE"));
  CHECK(parse_hybrid_id("MLP3-FT:GP").learner == "MLP3-FT");
  CHECK_THROWS_AS(parse_hybrid_id("CC:MLP1"), ConfigError);

  const Dataset& ds = small_synthetic();
  MethodParams params;
  const HybridResult r = train_hybrid(parse_learner("LINRE"), "CC", params, ds, SplitSpec{0.5, 0.5, 0.0, 3, true}, 4);
  CHECK(r.predicted.size() == r.teacher.size());
  CHECK(r.predicted.size() == static_cast<Eigen::Index>(r.split.validation.size()));
  CHECK(pearson(r.predicted.values, r.teacher.values) > 0.9);

  CHECK_THROWS_AS(train_hybrid(parse_learner("LINRE"), "CC", params, ds, SplitSpec{1.0, 0.0, 0.0, 3, true}, 4), DataError);
  MethodParams broken;
  broken.pga_delta = 10000;
  try {
    train_hybrid(parse_learner("LINRE"), "PGA", broken, ds, SplitSpec{0.5, 0.5, 0.0, 3, true}, 4);
    FAIL("expected teacher failure");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("PGA") != std::string::npos);
  }
}

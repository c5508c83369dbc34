#include "psd/learners.hpp"

#include <cmath>

#include "psd/error.hpp"
#include "psd/rng.hpp"

namespace psd {
namespace {

struct Parsed {
  LearnerKind kind;
  MlpPreset preset = MlpPreset::Mlp1;
  std::string_view suffix{};
};

std::optional<Parsed> split_id(std::string_view id) {
  if (id == "KNN") return Parsed{LearnerKind::Knn};
  if (id == "LINRE") return Parsed{LearnerKind::Linear};
  if (id == "LOGRE" || id == "LRSTFT") return Parsed{LearnerKind::Logistic};
  if (id.size() < 4 || id.substr(0, 3) != "MLP") return std::nullopt;
  Parsed p{LearnerKind::Mlp};
  switch (id[3]) {
    case '1': p.preset = MlpPreset::Mlp1; break;
    case '2': p.preset = MlpPreset::Mlp2; break;
    case '3': p.preset = MlpPreset::Mlp3; break;
    default: return std::nullopt;
  }
  const std::string_view rest = id.substr(4);
  if (rest.empty()) return p;
  if (rest[0] != '-') return std::nullopt;
  p.suffix = rest.substr(1);
  static constexpr std::string_view known[] = {"RAW", "FT", "PCA", "STFT", "WT", "CQ"};
  for (auto k : known) {
    if (p.suffix == k) return p;
  }
  return std::nullopt;
}

Eigen::MatrixXd rows_of(const TrainedLearner& l, const Dataset& ds) {
  return l.standardizer.transform(extract_features(l.spec.features, ds));
}

std::uint64_t learner_seed(std::uint64_t seed, const LearnerSpec& spec) { return derive_seed(seed, spec.id); }

TrainedLearner prepare(const LearnerSpec& spec, const Dataset& training, Eigen::MatrixXd& x) {
  if (training.empty()) throw DataError(spec.id + ": empty training set");
  TrainedLearner l;
  l.spec = spec;
  l.spec.features = fit_features(spec.features, training);
  const Eigen::MatrixXd raw = extract_features(l.spec.features, training);
  l.standardizer = Standardizer::fit(raw);
  x = l.standardizer.transform(raw);
  return l;
}

std::vector<int> mlp_widths(const LearnerSpec& spec, Eigen::Index input) {
  std::vector<int> w{static_cast<int>(input)};
  for (int h : preset_hidden(spec.preset)) w.push_back(h);
  w.push_back(1);
  return w;
}

}  // namespace

bool is_learner_id(std::string_view id) { return split_id(id).has_value(); }

LearnerSpec parse_learner(std::string_view id, const KeyValueConfig& cfg) {
  const auto parsed = split_id(id);
  if (!parsed) throw ConfigError("unknown learner id: " + std::string(id));
  LearnerSpec s;
  s.id = std::string(id);
  s.kind = parsed->kind;
  s.preset = parsed->preset;
  FeatureSpec& f = s.features;
  f.stft_window = cfg.get_int("learn.stft_window", f.stft_window);
  f.stft_hop = cfg.get_int("learn.stft_hop", f.stft_hop);
  f.segments = cfg.get_int("learn.segments", f.segments);
  f.truncation_points = cfg.get_int("learn.truncation_points", f.truncation_points);
  const Eigen::Index pca_k = cfg.get_int("learn.pca_components", f.pca_components);
  s.k = static_cast<int>(cfg.get_int("learn.knn_k", s.k));
  s.mlp.epochs = static_cast<int>(cfg.get_int("learn.epochs", s.mlp.epochs));
  s.mlp.batch_size = static_cast<int>(cfg.get_int("learn.batch", s.mlp.batch_size));
  s.mlp.learning_rate = cfg.get_double("learn.lr", s.mlp.learning_rate);
  s.logistic_epochs = static_cast<int>(cfg.get_int("learn.logistic_epochs", s.logistic_epochs));
  s.logistic_lr = cfg.get_double("learn.logistic_lr", s.logistic_lr);

  if (id == "KNN") {
    f.kind = FeatureKind::SegmentSums;
  } else if (id == "LINRE" || id == "LOGRE") {
    f.kind = FeatureKind::Pca;
    f.pca_components = 2;
  } else if (id == "LRSTFT") {
    f.kind = FeatureKind::Pca;
    f.pca_source = FeatureKind::StftMag;
    f.pca_components = cfg.get_int("learn.lrstft_components", 20);
  } else {
    const std::string_view suffix = parsed->suffix;
    if (suffix.empty()) {
      f.kind = s.preset == MlpPreset::Mlp2 ? FeatureKind::CumulativeCharge : FeatureKind::Raw;
    } else if (suffix == "RAW") {
      f.kind = FeatureKind::Raw;
    } else if (suffix == "FT") {
      f.kind = FeatureKind::FftMag;
    } else if (suffix == "PCA") {
      f.kind = FeatureKind::Pca;
      f.pca_components = pca_k;
    } else if (suffix == "STFT") {
      f.kind = FeatureKind::StftMag;
    } else if (suffix == "WT") {
      f.kind = FeatureKind::DwtHaar;
    } else {
      f.kind = FeatureKind::CumulativeCharge;
    }
  }
  f.validate();
  return s;
}

TrainedLearner train_classifier(const LearnerSpec& spec, const Dataset& training, std::uint64_t seed) {
  if (!training.labeled()) throw DataError(spec.id + ": classifier training needs labels");
  Eigen::MatrixXd x;
  TrainedLearner l = prepare(spec, training, x);
  l.task = LearnerTask::Classify;
  const std::vector<Label>& labels = *training.labels;
  switch (spec.kind) {
    case LearnerKind::Knn:
      l.model = knn_fit(x, labels, spec.k);
      break;
    case LearnerKind::Linear: {
      Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
      for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = label_value(labels[i]);
      l.model = fit_linear(x, y);
      break;
    }
    case LearnerKind::Logistic:
      l.model = fit_logistic(x, labels, spec.logistic_epochs, spec.logistic_lr);
      break;
    case LearnerKind::Mlp: {
      Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
      for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = label_value(labels[i]);
      const std::uint64_t s = learner_seed(seed, spec);
      MlpModel m = mlp_init(mlp_widths(spec, x.cols()), s, MlpTask::Classify, preset_dropout(spec.preset));
      MlpTrainConfig cfg = spec.mlp;
      cfg.seed = splitmix64(s);
      MlpTrainResult r = mlp_train(std::move(m), x, y, cfg);
      l.model = std::move(r.model);
      l.epoch_loss = std::move(r.epoch_loss);
      break;
    }
  }
  return l;
}

TrainedLearner train_regressor(const LearnerSpec& spec, const Dataset& training, const Eigen::VectorXd& targets,
                               std::uint64_t seed) {
  if (static_cast<std::size_t>(targets.size()) != training.size()) {
    throw DataError(spec.id + ": target count does not match training pulses");
  }
  if (!targets.allFinite()) throw DataError(spec.id + ": non-finite regression target");
  Eigen::MatrixXd x;
  TrainedLearner l = prepare(spec, training, x);
  l.task = LearnerTask::Regress;
  l.target_mean = targets.mean();
  const double var = (targets.array() - l.target_mean).square().mean();
  l.target_scale = var > 0 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd y = (targets.array() - l.target_mean) / l.target_scale;
  switch (spec.kind) {
    case LearnerKind::Knn:
      l.model = knn_fit(x, Eigen::VectorXd(y), spec.k);
      break;
    case LearnerKind::Linear:
      l.model = fit_linear(x, y);
      break;
    case LearnerKind::Logistic:
      throw ConfigError(spec.id + ": logistic models cannot regress");
    case LearnerKind::Mlp: {
      const std::uint64_t s = learner_seed(seed, spec);
      MlpModel m = mlp_init(mlp_widths(spec, x.cols()), s, MlpTask::Regress, preset_dropout(spec.preset));
      MlpTrainConfig cfg = spec.mlp;
      cfg.seed = splitmix64(s);
      MlpTrainResult r = mlp_train(std::move(m), x, y, cfg);
      l.model = std::move(r.model);
      l.epoch_loss = std::move(r.epoch_loss);
      break;
    }
  }
  return l;
}

double TrainedLearner::score(const Eigen::VectorXd& pulse) const {
  const Eigen::VectorXd x = standardizer.transform(extract_features(spec.features, pulse));
  double raw = 0;
  if (const auto* knn = std::get_if<KnnModel>(&model)) {
    raw = task == LearnerTask::Classify ? knn_score(*knn, x) : knn_regress(*knn, x);
  } else if (const auto* lin = std::get_if<LinearModel>(&model)) {
    raw = predict(*lin, x);
  } else {
    raw = mlp_predict(std::get<MlpModel>(model), x);
  }
  return task == LearnerTask::Regress ? target_mean + target_scale * raw : raw;
}

Eigen::VectorXd TrainedLearner::score(const Dataset& ds) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(ds.size()));
  if (const auto* mlp = std::get_if<MlpModel>(&model)) {
    out = mlp_predict(*mlp, rows_of(*this, ds));
    if (task == LearnerTask::Regress) out = (target_mean + target_scale * out.array()).matrix();
    return out;
  }
  for (std::size_t i = 0; i < ds.size(); ++i) out[static_cast<Eigen::Index>(i)] = score(ds.pulses[i].samples);
  return out;
}

Label TrainedLearner::classify(const Eigen::VectorXd& pulse) const {
  if (task != LearnerTask::Classify) throw ConfigError(spec.id + ": regressor cannot classify");
  if (const auto* knn = std::get_if<KnnModel>(&model)) {
    return knn_classify(*knn, standardizer.transform(extract_features(spec.features, pulse)));
  }
  return score(pulse) >= 0.5 ? Label::Neutron : Label::Gamma;
}

std::vector<Label> TrainedLearner::classify(const Dataset& ds) const {
  std::vector<Label> out;
  out.reserve(ds.size());
  if (std::holds_alternative<KnnModel>(model)) {
    for (const auto& p : ds.pulses) out.push_back(classify(p.samples));
    return out;
  }
  if (task != LearnerTask::Classify) throw ConfigError(spec.id + ": regressor cannot classify");
  const Eigen::VectorXd s = score(ds);
  for (double v : s) out.push_back(v >= 0.5 ? Label::Neutron : Label::Gamma);
  return out;
}

}  // namespace psd

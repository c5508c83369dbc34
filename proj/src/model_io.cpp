#include "psd/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "psd/error.hpp"

namespace psd {
namespace {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
json row_json(const Eigen::RowVectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Column-major flattening.
json mat_json(const Eigen::MatrixXd& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Eigen::MatrixXd json_mat(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw DataError("model file: matrix size mismatch");
  return Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
}

json features_json(const FeatureSpec& f) {
  json j = {{"kind", feature_kind_name(f.kind)},
            {"pca_source", feature_kind_name(f.pca_source)},
            {"stft_window", f.stft_window},
            {"stft_hop", f.stft_hop},
            {"pca_components", f.pca_components},
            {"segments", f.segments},
            {"truncation_points", f.truncation_points}};
  if (f.pca) j["pca"] = {{"mean", vec_json(f.pca->mean)}, {"components", mat_json(f.pca->components)}};
  return j;
}

FeatureSpec json_features(const json& j) {
  FeatureSpec f;
  f.kind = parse_feature_kind(j.at("kind").get<std::string>());
  f.pca_source = parse_feature_kind(j.at("pca_source").get<std::string>());
  f.stft_window = j.at("stft_window").get<Eigen::Index>();
  f.stft_hop = j.at("stft_hop").get<Eigen::Index>();
  f.pca_components = j.at("pca_components").get<Eigen::Index>();
  f.segments = j.at("segments").get<Eigen::Index>();
  f.truncation_points = j.at("truncation_points").get<Eigen::Index>();
  if (j.contains("pca")) f.pca = PcaBasis{json_vec(j["pca"].at("mean")), json_mat(j["pca"].at("components"))};
  f.validate();
  return f;
}

json model_json(const TrainedLearner& l) {
  if (const auto* knn = std::get_if<KnnModel>(&l.model)) {
    json j = {{"type", "knn"}, {"k", knn->k}, {"features", mat_json(knn->features)}};
    if (!knn->labels.empty()) {
      std::string labels;
      for (Label x : knn->labels) labels += label_name(x);
      j["labels"] = labels;
    } else {
      j["targets"] = vec_json(knn->targets);
    }
    return j;
  }
  if (const auto* lin = std::get_if<LinearModel>(&l.model)) {
    return {{"type", "linear"},
            {"link", lin->link == Link::Logistic ? "logistic" : "identity"},
            {"coefficients", vec_json(lin->coefficients)},
            {"intercept", lin->intercept}};
  }
  const auto& m = std::get<MlpModel>(l.model);
  json weights = json::array(), biases = json::array();
  for (std::size_t i = 0; i < m.layers(); ++i) {
    weights.push_back(mat_json(m.weights[i]));
    biases.push_back(vec_json(m.biases[i]));
  }
  return {{"type", "mlp"},
          {"widths", m.widths},
          {"output", m.task == MlpTask::Classify ? "sigmoid" : "linear"},
          {"dropout", m.dropout},
          {"weights", weights},
          {"biases", biases}};
}

void json_model(const json& j, TrainedLearner& l) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "knn") {
    const Eigen::MatrixXd features = json_mat(j.at("features"));
    const int k = j.at("k").get<int>();
    if (j.contains("labels")) {
      std::vector<Label> labels;
      for (char c : j["labels"].get<std::string>()) labels.push_back(parse_label(std::string(1, c)));
      l.model = knn_fit(features, std::move(labels), k);
    } else {
      l.model = knn_fit(features, json_vec(j.at("targets")), k);
    }
  } else if (type == "linear") {
    LinearModel m;
    m.link = j.at("link").get<std::string>() == "logistic" ? Link::Logistic : Link::Identity;
    m.coefficients = json_vec(j.at("coefficients"));
    m.intercept = j.at("intercept").get<double>();
    l.model = std::move(m);
  } else if (type == "mlp") {
    MlpModel m;
    m.widths = j.at("widths").get<std::vector<int>>();
    m.task = j.at("output").get<std::string>() == "sigmoid" ? MlpTask::Classify : MlpTask::Regress;
    m.dropout = j.at("dropout").get<double>();
    for (const auto& w : j.at("weights")) m.weights.push_back(json_mat(w));
    for (const auto& b : j.at("biases")) m.biases.push_back(json_vec(b));
    if (m.weights.size() + 1 != m.widths.size() || m.biases.size() != m.weights.size()) {
      throw DataError("model file: layer count does not match widths");
    }
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      if (m.weights[i].rows() != m.widths[i + 1] || m.weights[i].cols() != m.widths[i] ||
          m.biases[i].size() != m.widths[i + 1]) {
        throw DataError("model file: layer " + std::to_string(i) + " shape does not match widths");
      }
      if (!m.weights[i].allFinite() || !m.biases[i].allFinite()) throw DataError("model file: non-finite weight");
    }
    l.model = std::move(m);
  } else {
    throw DataError("model file: unknown model type " + type);
  }
}

}  // namespace

std::string learner_to_json(const TrainedLearner& l) {
  json j = {{"format", "psd-learner"},
            {"version", kModelFormatVersion},
            {"id", l.spec.id},
            {"task", l.task == LearnerTask::Classify ? "classify" : "regress"},
            {"hyperparameters",
             {{"k", l.spec.k},
              {"epochs", l.spec.mlp.epochs},
              {"batch", l.spec.mlp.batch_size},
              {"lr", l.spec.mlp.learning_rate},
              {"logistic_epochs", l.spec.logistic_epochs},
              {"logistic_lr", l.spec.logistic_lr}}},
            {"features", features_json(l.spec.features)},
            {"normalization", {{"mean", row_json(l.standardizer.mean)}, {"scale", row_json(l.standardizer.scale)}}},
            {"target", {{"mean", l.target_mean}, {"scale", l.target_scale}}},
            {"model", model_json(l)}};
  return j.dump(1) + "\n";
}

TrainedLearner learner_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  try {
    if (j.value("format", "") != "psd-learner") throw DataError("model file: not a learner document");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("model file: unsupported version " + std::to_string(version));
    }
    TrainedLearner l;
    l.spec = parse_learner(j.at("id").get<std::string>());
    const auto& h = j.at("hyperparameters");
    l.spec.k = h.at("k").get<int>();
    l.spec.mlp.epochs = h.at("epochs").get<int>();
    l.spec.mlp.batch_size = h.at("batch").get<int>();
    l.spec.mlp.learning_rate = h.at("lr").get<double>();
    l.spec.logistic_epochs = h.at("logistic_epochs").get<int>();
    l.spec.logistic_lr = h.at("logistic_lr").get<double>();
    l.spec.features = json_features(j.at("features"));
    l.task = j.at("task").get<std::string>() == "classify" ? LearnerTask::Classify : LearnerTask::Regress;
    l.standardizer.mean = json_vec(j.at("normalization").at("mean")).transpose();
    l.standardizer.scale = json_vec(j.at("normalization").at("scale")).transpose();
    l.target_mean = j.at("target").at("mean").get<double>();
    l.target_scale = j.at("target").at("scale").get<double>();
    json_model(j.at("model"), l);
    return l;
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void save_learner(const TrainedLearner& learner, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << learner_to_json(learner);
}

TrainedLearner load_learner(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return learner_from_json(ss.str());
}

}  // namespace psd

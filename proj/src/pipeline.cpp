#include "psd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "psd/error.hpp"
#include "psd/gaussian_fit.hpp"
#include "psd/hybrid.hpp"
#include "psd/knn.hpp"
#include "psd/learners.hpp"
#include "psd/metrics.hpp"
#include "psd/model_io.hpp"
#include "psd/plot.hpp"
#include "psd/rng.hpp"

namespace psd {

using ojson = nlohmann::ordered_json;

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
  RunConfig c;
  c.raw = cfg;
  if (auto p = cfg.get("data.dataset")) c.dataset = *p;
  if (auto p = cfg.get("data.labels")) c.labels = *p;
  c.dt = cfg.get_double("data.dt", c.dt);
  c.preprocess.calibration = cfg.get_double("data.calibration", c.preprocess.calibration);

  c.synth_neutrons = static_cast<std::size_t>(cfg.get_int("synth.neutrons", static_cast<long long>(c.synth_neutrons)));
  c.synth_gammas = static_cast<std::size_t>(cfg.get_int("synth.gammas", static_cast<long long>(c.synth_gammas)));
  c.synth_neutron = SynthParams::from_config(cfg.section("synth.neutron"), c.synth_neutron);
  c.synth_gamma = SynthParams::from_config(cfg.section("synth.gamma"), c.synth_gamma);

  PreprocessOptions& pp = c.preprocess;
  pp.reject = cfg.get_bool("preprocess.reject", pp.reject);
  pp.flat_run = static_cast<int>(cfg.get_int("preprocess.flat_run", pp.flat_run));
  pp.peak_fraction = cfg.get_double("preprocess.peak_fraction", pp.peak_fraction);
  const std::string filter = cfg.get_string("preprocess.filter", "moving_average");
  if (filter == "moving_average") {
    pp.filter = FilterKind::MovingAverage;
  } else if (filter == "median") {
    pp.filter = FilterKind::Median;
  } else if (filter == "none") {
    pp.filter.reset();
  } else {
    throw ConfigError("preprocess.filter must be moving_average, median or none");
  }
  pp.window = cfg.get_int("preprocess.window", pp.window);
  pp.baseline_samples = cfg.get_int("preprocess.baseline", pp.baseline_samples);
  pp.normalize = cfg.get_bool("preprocess.normalize", pp.normalize);

  c.split.validation = cfg.get_double("split.validation", c.split.validation);
  c.split.training = cfg.get_double("split.training", c.split.training);
  c.split.test = cfg.get_double("split.test", c.split.test);
  c.split.stratified = cfg.get_bool("split.stratified", c.split.stratified);

  c.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", 0));
  if (auto p = cfg.get("run.out")) c.out_dir = *p;
  c.thresholds = cfg.get_doubles("run.thresholds", {});
  const std::string fmt = cfg.get_string("run.format", "json");
  if (fmt == "json") {
    c.format = OutputFormat::Json;
  } else if (fmt == "csv") {
    c.format = OutputFormat::Csv;
  } else {
    throw ConfigError("run.format must be json or csv");
  }
  c.knn_k = static_cast<int>(cfg.get_int("run.knn_k", c.knn_k));
  c.plots = cfg.get_bool("run.plots", c.plots);
  c.params = MethodParams::from_config(cfg);
  c.set_methods(cfg.get_list("run.methods", {"all"}));
  return c;
}

void RunConfig::set_methods(const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  auto add = [&](const std::string& id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  for (const auto& id : ids) {
    if (id == "all" || id == "statistical") {
      for (const auto& m : statistical_method_ids()) add(m);
    } else if (is_statistical_method(id) || is_learner_id(id) || is_hybrid_id(id)) {
      add(id);
    } else {
      throw ConfigError("unknown method id: " + id);
    }
  }
  if (out.empty()) throw ConfigError("at least one method is required");
  methods = std::move(out);
}

void RunConfig::validate() const {
  if (methods.empty()) throw ConfigError("at least one method is required");
  split.validate();
  params.gates.validate();
  if (knn_k < 1) throw ConfigError("run.knn_k must be positive");
  if (!(preprocess.calibration > 0)) throw ConfigError("data.calibration must be positive");
  if (preprocess.filter && preprocess.window < 1) throw ConfigError("preprocess.window must be positive");
  if (!dataset && synth_neutrons + synth_gammas == 0) throw ConfigError("no dataset and no synthetic pulses requested");
  if (labels && !dataset) throw ConfigError("--labels given without --dataset");
}

Dataset acquire_dataset(const RunConfig& cfg) {
  if (cfg.dataset) return load_dataset(*cfg.dataset, cfg.labels, cfg.dt);
  SynthParams n = cfg.synth_neutron, g = cfg.synth_gamma;
  n.seed = derive_seed(cfg.seed ^ n.seed, "synth.neutron");
  g.seed = derive_seed(cfg.seed ^ g.seed, "synth.gamma");
  return synthesize_dataset(cfg.synth_neutrons, cfg.synth_gammas, n, g);
}

PreprocessResult preprocess_dataset(const Dataset& ds, const PreprocessOptions& opts) {
  PreprocessResult r;
  r.data.source = ds.source;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Pulse& p = ds.pulses[i];
    if (opts.reject && reject_corrupted(p, opts.flat_run, opts.peak_fraction).rejected()) {
      ++r.rejected;
      continue;
    }
    Pulse q = p;
    if (opts.filter && opts.window > 1) q = filter_pulse(q, *opts.filter, opts.window);
    if (opts.baseline_samples > 0) q = baseline_subtract(q, opts.baseline_samples);
    r.energy.push_back(pulse_energy(q, opts.calibration));
    r.data.pulses.push_back(std::move(q));
    if (ds.labels) labels.push_back((*ds.labels)[i]);
  }
  if (ds.labels) r.data.labels = std::move(labels);
  return r;
}

Dataset select_energy(const PreprocessResult& pre, std::optional<double> threshold, const PreprocessOptions& opts) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pre.data.size(); ++i) {
    if (!threshold || pre.energy[i] >= *threshold) keep.push_back(i);
  }
  Dataset out = pre.data.subset(keep);
  if (opts.normalize) {
    for (auto& p : out.pulses) {
      if (p.samples.maxCoeff() > 0) p = normalize_amplitude(p);
    }
  }
  return out;
}

namespace {

std::string file_stem(const std::string& id) {
  std::string s = id;
  std::replace(s.begin(), s.end(), ':', '-');
  return s;
}

std::string method_kind(const std::string& id) {
  if (is_statistical_method(id)) return "statistical";
  if (is_hybrid_id(id)) return "hybrid";
  return "learner";
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

SplitSpec effective_split(const RunConfig& cfg, const Dataset& ds) {
  SplitSpec s = cfg.split;
  s.seed = derive_seed(cfg.seed, "split");
  if (!ds.labeled()) s.stratified = false;
  return s;
}

void log_line(const std::string& msg) { std::cerr << "[psd] " << msg << '\n'; }

// Everything gathered for one method inside one scenario.
struct MethodOutcome {
  ojson report;
  std::optional<Eigen::VectorXd> validation_factors;
  bool errored = false;
};

std::vector<Label> pick(const std::vector<Label>& labels, const std::vector<Eigen::Index>& idx) {
  std::vector<Label> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<Eigen::Index> finite_indices(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) idx.push_back(i);
  }
  return idx;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[idx[k]];
  return out;
}

ojson metrics_json(const ClassificationMetrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

struct PlotSink {
  bool enabled;
  std::filesystem::path dir;
  std::vector<std::filesystem::path>* written;

  void emit(const std::string& name, const std::string& text) const {
    if (!enabled) return;
    std::filesystem::create_directories(dir);
    write_text_file(dir / name, text);
    written->push_back(dir / name);
  }
};

// FOM on the validation factors, plus (when labeled) KNN-on-factor metrics
// and ROC. `predicted` overrides KNN classification for learners.
void evaluate_series(ojson& r, const std::string& id, const Eigen::VectorXd& val, const Eigen::VectorXd* train,
                     const Dataset& training, const Dataset& validation, int knn_k,
                     const std::vector<Label>* predicted, const PlotSink& plots) {
  const std::vector<Eigen::Index> ok = finite_indices(val);
  r["factors"] = static_cast<long long>(val.size());
  r["invalid_factors"] = static_cast<long long>(val.size()) - static_cast<long long>(ok.size());
  const Eigen::VectorXd finite = gather(val, ok);
  const FomAnalysis fa = analyze_fom(finite);
  r["fom"] = number_or_null(fa.fom.value);
  r["fom_status"] = fa.fom.failed ? "Failed" : "ok";
  if (!fa.fom.reason.empty()) r["fom_note"] = fa.fom.reason;
  if (fa.histogram.bins() > 0) {
    r["histogram_bins"] = fa.histogram.bins();
    r["fit"] = {{"mu1", fa.fit.mu1},       {"sigma1", fa.fit.sigma1}, {"mu2", fa.fit.mu2},
                {"sigma2", fa.fit.sigma2}, {"converged", fa.fit.converged}, {"residual", fa.fit.residual},
                {"iterations", fa.fit.iterations}};
    plots.emit(file_stem(id) + "_hist.csv", histogram_csv(fa.histogram));
    plots.emit(file_stem(id) + "_hist.svg", histogram_svg(fa.histogram, &fa.fit, id + " factor histogram"));
  }
  if (!validation.labeled()) return;

  const std::vector<Label> truth_all = *validation.labels;
  std::vector<Label> truth, pred;
  if (predicted) {
    truth = truth_all;
    pred = *predicted;
  } else {
    const std::vector<Eigen::Index> tok = finite_indices(*train);
    if (tok.size() < static_cast<std::size_t>(knn_k)) throw DataError(id + ": too few finite training factors for KNN");
    Eigen::MatrixXd tf = gather(*train, tok);
    const KnnModel knn = knn_fit(std::move(tf), pick(*training.labels, tok), knn_k);
    truth = pick(truth_all, ok);
    pred.resize(ok.size());
    parallel_for(ok.size(), [&](std::size_t k) {
      pred[k] = knn_classify(knn, Eigen::VectorXd::Constant(1, finite[static_cast<Eigen::Index>(k)]));
    });
  }
  r["classification"] = metrics_json(classification_metrics(truth, pred));
  r["classified"] = static_cast<long long>(truth.size());
  const std::vector<Label> roc_truth = pick(truth_all, ok);
  try {
    const RocCurve roc = roc_auc(finite, roc_truth);
    r["auc"] = roc.auc;
    r["polarity"] = roc.inverted ? "inverted" : "normal";
    plots.emit(file_stem(id) + "_roc.csv", roc_csv(roc));
    plots.emit(file_stem(id) + "_roc.svg", roc_svg(roc, id + " ROC"));
  } catch (const DataError& e) {
    r["auc"] = nullptr;
    r["auc_note"] = e.what();
  }
}

MethodOutcome evaluate_method(const RunConfig& cfg, const std::string& id, const Dataset& ds,
                              const SplitIndices& split, const Dataset& training, const Dataset& validation,
                              const PlotSink& plots) {
  MethodOutcome out;
  ojson& r = out.report;
  r["method"] = id;
  r["kind"] = method_kind(id);
  try {
    if (is_statistical_method(id)) {
      const Discriminator d = fit_discriminator(id, cfg.params, training, cfg.seed);
      if (d.used_pseudo_labels()) r["references"] = "CC pseudo-labels";
      const Eigen::VectorXd val = compute_factors(d, validation).values;
      Eigen::VectorXd train;
      if (validation.labeled()) train = compute_factors(d, training).values;
      evaluate_series(r, id, val, &train, training, validation, cfg.knn_k, nullptr, plots);
      out.validation_factors = val;
    } else if (is_hybrid_id(id)) {
      const HybridId h = parse_hybrid_id(id);
      const LearnerSpec spec = parse_learner(h.learner, cfg.raw);
      const HybridResult hr = train_hybrid(spec, h.teacher, cfg.params, ds, effective_split(cfg, ds), cfg.seed);
      const Eigen::VectorXd& val = hr.predicted.values;
      Eigen::VectorXd train;
      if (validation.labeled()) train = hr.student.score(training);
      evaluate_series(r, id, val, &train, training, validation, cfg.knn_k, nullptr, plots);
      const std::vector<Eigen::Index> both = [&] {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < val.size(); ++i) {
          if (std::isfinite(val[i]) && std::isfinite(hr.teacher.values[i])) idx.push_back(i);
        }
        return idx;
      }();
      try {
        r["teacher_pearson"] = pearson(gather(val, both), gather(hr.teacher.values, both));
      } catch (const DataError& e) {
        r["teacher_pearson"] = nullptr;
      }
      const FomAnalysis teacher_fa = analyze_fom(hr.teacher.finite_values());
      r["teacher_fom"] = number_or_null(teacher_fa.fom.value);
      out.validation_factors = val;
      (void)split;
    } else {
      const LearnerSpec spec = parse_learner(id, cfg.raw);
      const TrainedLearner l = train_classifier(spec, training, cfg.seed);
      const Eigen::VectorXd val = l.score(validation);
      const std::vector<Label> pred = l.classify(validation);
      evaluate_series(r, id, val, nullptr, training, validation, cfg.knn_k, &pred, plots);
      out.validation_factors = val;
    }
    const bool failed = r.value("fom_status", "Failed") == "Failed";
    r["status"] = failed ? "Failed" : "ok";
  } catch (const Error& e) {
    out.errored = true;
    out.validation_factors.reset();
    r["status"] = "error";
    r["fom"] = nullptr;
    r["fom_status"] = "Failed";
    r["error"] = e.what();
  }
  return out;
}

ojson correlation_json(const std::vector<std::string>& ids, const std::vector<Eigen::VectorXd>& series) {
  ojson j;
  if (series.empty()) {
    j["methods"] = ojson::array();
    return j;
  }
  const Eigen::Index n = series.front().size();
  std::vector<Eigen::Index> common;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool all = true;
    for (const auto& s : series) all = all && std::isfinite(s[i]);
    if (all) common.push_back(i);
  }
  std::vector<std::string> used;
  std::vector<Eigen::VectorXd> kept;
  ojson skipped = ojson::array();
  for (std::size_t m = 0; m < series.size(); ++m) {
    Eigen::VectorXd v = gather(series[m], common);
    if (v.size() >= 2 && (v.array() != v[0]).any()) {
      used.push_back(ids[m]);
      kept.push_back(std::move(v));
    } else {
      skipped.push_back(ids[m]);
    }
  }
  j["methods"] = used;
  j["pulses"] = static_cast<long long>(common.size());
  if (!skipped.empty()) j["skipped_constant"] = skipped;
  if (kept.empty()) return j;
  const Eigen::MatrixXd r = pearson_matrix(kept);
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index k = 0; k < r.cols(); ++k) row.push_back(r(i, k));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  return j;
}

std::string correlation_csv(const ojson& corr) {
  std::string out = "method";
  for (const auto& m : corr["methods"]) out += "," + m.get<std::string>();
  out += "\n";
  if (!corr.contains("matrix")) return out;
  for (std::size_t i = 0; i < corr["methods"].size(); ++i) {
    out += corr["methods"][i].get<std::string>();
    for (const auto& v : corr["matrix"][i]) out += "," + format_double(v.get<double>());
    out += "\n";
  }
  return out;
}

ojson dataset_json(const Dataset& raw, const PreprocessResult& pre) {
  ojson j = {{"source", raw.source},
             {"pulses", raw.size()},
             {"length", raw.length()},
             {"labeled", raw.labeled()},
             {"rejected", pre.rejected}};
  if (raw.labeled()) j["counts"] = {{"n", raw.count(Label::Neutron)}, {"g", raw.count(Label::Gamma)}};
  return j;
}

ojson preprocess_json(const PreprocessOptions& p) {
  std::string filter = "none";
  if (p.filter) filter = *p.filter == FilterKind::MovingAverage ? "moving_average" : "median";
  return {{"reject", p.reject},
          {"filter", filter},
          {"window", p.window},
          {"baseline", p.baseline_samples},
          {"normalize", p.normalize},
          {"calibration", p.calibration}};
}

ojson implementation_notes() {
  return {{"histogram_bins", "Freedman-Diaconis, clamped to [50, 500]"},
          {"gaussian_fit", "Levenberg-Marquardt on bin centers, initial damping 1e-3"},
          {"classification", "KNN (k nearest) on the 1-D factor, fitted on the training split"},
          {"averaging", "support-weighted over both classes"}};
}

void write_output(const std::filesystem::path& path, const std::string& text, RunSummary& s) {
  write_text_file(path, text);
  s.written.push_back(path);
}

std::string scenario_name(std::optional<double> t) { return t ? "E>=" + format_double(*t) : "all"; }
std::string scenario_dir(std::optional<double> t) { return t ? "threshold_" + format_double(*t) : "all"; }

const char* csv_field(const ojson& j, const char* key, std::string& buf) {
  if (!j.contains(key) || j[key].is_null()) return "";
  buf = j[key].is_string() ? j[key].get<std::string>() : j[key].is_number() ? format_double(j[key].get<double>()) : j[key].dump();
  return buf.c_str();
}

std::string benchmark_csv(const ojson& report) {
  std::string out = "scenario,method,kind,status,fom,fom_status,accuracy,precision,recall,f1,auc,polarity,invalid_factors\n";
  for (const auto& sc : report["scenarios"]) {
    for (const auto& m : sc["methods"]) {
      std::string b;
      out += sc["name"].get<std::string>() + ",";
      out += std::string(csv_field(m, "method", b)) + ",";
      out += std::string(csv_field(m, "kind", b)) + ",";
      out += std::string(csv_field(m, "status", b)) + ",";
      out += std::string(csv_field(m, "fom", b)) + ",";
      out += std::string(csv_field(m, "fom_status", b)) + ",";
      const ojson cls = m.contains("classification") ? m["classification"] : ojson::object();
      for (const char* k : {"accuracy", "precision", "recall", "f1"}) out += std::string(csv_field(cls, k, b)) + ",";
      out += std::string(csv_field(m, "auc", b)) + ",";
      out += std::string(csv_field(m, "polarity", b)) + ",";
      out += std::string(csv_field(m, "invalid_factors", b)) + "\n";
    }
  }
  return out;
}

}  // namespace

RunSummary run_synth(const RunConfig& cfg) {
  RunSummary s;
  const Dataset ds = acquire_dataset(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const auto data = cfg.out_dir / "pulses.csv";
  const auto labels = cfg.out_dir / "labels.csv";
  save_dataset(ds, data);
  save_labels(*ds.labels, labels);
  s.written = {data, labels};
  log_line("wrote " + std::to_string(ds.size()) + " pulses to " + data.string());
  return s;
}

RunSummary run_discriminate(const RunConfig& cfg) {
  RunSummary s;
  for (const auto& id : cfg.methods) {
    if (!is_statistical_method(id)) {
      throw ConfigError("discriminate takes statistical method ids only (got " + id + "); use benchmark or train");
    }
  }
  const Dataset raw = acquire_dataset(cfg);
  const PreprocessResult pre = preprocess_dataset(raw, cfg.preprocess);
  const Dataset ds = select_energy(pre, std::nullopt, cfg.preprocess);
  if (ds.empty()) throw DataError("no pulses left after preprocessing");
  std::filesystem::create_directories(cfg.out_dir);

  ojson summary = {{"command", "discriminate"}, {"seed", cfg.seed}, {"dataset", dataset_json(raw, pre)}};
  ojson methods = ojson::array();
  ojson factors_doc = {{"pulse_id", ojson::array()}, {"factors", ojson::object()}};
  for (const auto& p : ds.pulses) factors_doc["pulse_id"].push_back(p.id);
  for (const auto& id : cfg.methods) {
    ++s.methods;
    ojson m = {{"method", id}};
    try {
      const Discriminator d = fit_discriminator(id, cfg.params, ds, cfg.seed);
      const FactorSeries fs = compute_factors(d, ds);
      m["status"] = "ok";
      m["invalid_factors"] = static_cast<long long>(fs.invalid_count());
      if (cfg.format == OutputFormat::Csv) {
        const auto path = cfg.out_dir / ("factors_" + file_stem(id) + ".csv");
        save_factors(fs, ds, path);
        s.written.push_back(path);
      } else {
        ojson vals = ojson::array();
        for (double v : fs.values) vals.push_back(number_or_null(v));
        factors_doc["factors"][id] = vals;
      }
    } catch (const Error& e) {
      ++s.errored;
      m["status"] = "error";
      m["error"] = e.what();
      log_line(id + ": " + e.what());
    }
    methods.push_back(m);
  }
  summary["methods"] = methods;
  if (cfg.format == OutputFormat::Json) write_output(cfg.out_dir / "factors.json", factors_doc.dump(1) + "\n", s);
  write_output(cfg.out_dir / "discriminate.json", summary.dump(2) + "\n", s);
  return s;
}

RunSummary run_benchmark(const RunConfig& cfg) {
  RunSummary s;
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset raw = acquire_dataset(cfg);
  const PreprocessResult pre = preprocess_dataset(raw, cfg.preprocess);
  std::filesystem::create_directories(cfg.out_dir);

  ojson report = {{"command", "benchmark"},
                  {"format_version", 1},
                  {"seed", cfg.seed},
                  {"dataset", dataset_json(raw, pre)},
                  {"preprocessing", preprocess_json(cfg.preprocess)},
                  {"split", {{"validation", cfg.split.validation}, {"training", cfg.split.training}, {"test", cfg.split.test}}},
                  {"implementation_defined", implementation_notes()}};

  std::vector<std::optional<double>> scenarios;
  if (cfg.thresholds.empty()) {
    scenarios.push_back(std::nullopt);
  } else {
    for (double t : cfg.thresholds) scenarios.push_back(t);
  }

  ojson scenario_reports = ojson::array();
  int errored_everywhere = 0;
  std::vector<int> ok_count(cfg.methods.size(), 0);
  for (const auto& thr : scenarios) {
    ojson sc = {{"name", scenario_name(thr)}, {"threshold", thr ? ojson(*thr) : ojson(nullptr)}};
    const Dataset ds = select_energy(pre, thr, cfg.preprocess);
    sc["pulses"] = ds.size();
    ojson methods = ojson::array();
    std::vector<std::string> corr_ids;
    std::vector<Eigen::VectorXd> corr_series;
    try {
      if (ds.size() < 4) throw DataError("fewer than 4 pulses in scenario");
      const SplitIndices split = split_indices(ds, effective_split(cfg, ds));
      const Dataset training = ds.subset(split.training);
      const Dataset validation = ds.subset(split.validation);
      sc["partition"] = {{"validation", validation.size()}, {"training", training.size()}, {"test", split.test.size()}};
      const PlotSink plots{cfg.plots, cfg.out_dir / "plots" / scenario_dir(thr), &s.written};
      for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
        const auto& id = cfg.methods[k];
        const auto m0 = std::chrono::steady_clock::now();
        MethodOutcome mo = evaluate_method(cfg, id, ds, split, training, validation, plots);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - m0).count();
        log_line(scenario_name(thr) + " " + id + ": " + mo.report["status"].get<std::string>() + " (" +
                 std::to_string(secs) + " s)");
        if (!mo.errored) ++ok_count[k];
        if (mo.validation_factors) {
          corr_ids.push_back(id);
          corr_series.push_back(std::move(*mo.validation_factors));
        }
        methods.push_back(std::move(mo.report));
      }
      sc["methods"] = methods;
      sc["correlation"] = correlation_json(corr_ids, corr_series);
      if (cfg.format == OutputFormat::Csv) {
        write_output(cfg.out_dir / ("correlation_" + scenario_dir(thr) + ".csv"), correlation_csv(sc["correlation"]), s);
      }
    } catch (const DataError& e) {
      sc["error"] = e.what();
      sc["methods"] = ojson::array();
      log_line(scenario_name(thr) + ": " + e.what());
    }
    scenario_reports.push_back(std::move(sc));
  }
  report["scenarios"] = scenario_reports;
  for (int c : ok_count) errored_everywhere += c == 0 ? 1 : 0;
  s.methods = static_cast<int>(cfg.methods.size());
  s.errored = errored_everywhere;

  if (cfg.format == OutputFormat::Json) {
    write_output(cfg.out_dir / "report.json", report.dump(2) + "\n", s);
  } else {
    write_output(cfg.out_dir / "report.csv", benchmark_csv(report), s);
  }
  log_line("benchmark finished in " +
           std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s");
  return s;
}

RunSummary run_train(const RunConfig& cfg) {
  RunSummary s;
  for (const auto& id : cfg.methods) {
    if (is_statistical_method(id)) throw ConfigError("train takes learner or hybrid ids (got " + id + ")");
  }
  const Dataset raw = acquire_dataset(cfg);
  const PreprocessResult pre = preprocess_dataset(raw, cfg.preprocess);
  const Dataset ds = select_energy(pre, std::nullopt, cfg.preprocess);
  std::filesystem::create_directories(cfg.out_dir);
  const SplitSpec split_spec = effective_split(cfg, ds);

  ojson report = {{"command", "train"}, {"seed", cfg.seed}, {"dataset", dataset_json(raw, pre)}};
  ojson models = ojson::array();
  for (const auto& id : cfg.methods) {
    ++s.methods;
    ojson m = {{"method", id}, {"kind", method_kind(id)}};
    try {
      const SplitIndices split = split_indices(ds, split_spec);
      const Dataset training = ds.subset(split.training);
      const auto model_path = cfg.out_dir / (file_stem(id) + ".model.json");
      if (is_hybrid_id(id)) {
        const HybridId h = parse_hybrid_id(id);
        const HybridResult hr =
            train_hybrid(parse_learner(h.learner, cfg.raw), h.teacher, cfg.params, ds, split_spec, cfg.seed);
        save_learner(hr.student, model_path);
        s.written.push_back(model_path);
        const Dataset validation = ds.subset(split.validation);
        const auto factors_path = cfg.out_dir / ("predicted_" + file_stem(id) + ".csv");
        save_factors(hr.predicted, validation, factors_path);
        s.written.push_back(factors_path);
        const FomAnalysis fa = analyze_fom(hr.predicted.finite_values());
        const FomAnalysis ta = analyze_fom(hr.teacher.finite_values());
        m["fom"] = number_or_null(fa.fom.value);
        m["fom_status"] = fa.fom.failed ? "Failed" : "ok";
        m["teacher_fom"] = number_or_null(ta.fom.value);
        try {
          std::vector<Eigen::Index> both;
          for (Eigen::Index i = 0; i < hr.predicted.values.size(); ++i) {
            if (std::isfinite(hr.teacher.values[i])) both.push_back(i);
          }
          m["teacher_pearson"] = pearson(gather(hr.predicted.values, both), gather(hr.teacher.values, both));
        } catch (const DataError&) {
          m["teacher_pearson"] = nullptr;
        }
      } else {
        const TrainedLearner l = train_classifier(parse_learner(id, cfg.raw), training, cfg.seed);
        save_learner(l, model_path);
        s.written.push_back(model_path);
        const Dataset test = ds.subset(split.test);
        if (test.empty()) throw DataError("empty test split");
        m["test_pulses"] = test.size();
        m["test"] = metrics_json(classification_metrics(*test.labels, l.classify(test)));
        if (!l.epoch_loss.empty()) m["final_training_loss"] = l.epoch_loss.back();
      }
      m["model"] = model_path.filename().string();
      m["status"] = "ok";
    } catch (const Error& e) {
      ++s.errored;
      m["status"] = "error";
      m["error"] = e.what();
      log_line(id + ": " + e.what());
    }
    models.push_back(m);
  }
  report["models"] = models;
  write_output(cfg.out_dir / "train_report.json", report.dump(2) + "\n", s);
  return s;
}

RunSummary run_correlate(const RunConfig& cfg) {
  RunSummary s;
  for (const auto& id : cfg.methods) {
    if (!is_statistical_method(id)) throw ConfigError("correlate takes statistical method ids only (got " + id + ")");
  }
  const Dataset raw = acquire_dataset(cfg);
  const PreprocessResult pre = preprocess_dataset(raw, cfg.preprocess);
  const Dataset ds = select_energy(pre, std::nullopt, cfg.preprocess);
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> series;
  ojson errors = ojson::object();
  for (const auto& id : cfg.methods) {
    ++s.methods;
    try {
      const Discriminator d = fit_discriminator(id, cfg.params, ds, cfg.seed);
      series.push_back(compute_factors(d, ds).values);
      ids.push_back(id);
    } catch (const Error& e) {
      ++s.errored;
      errors[id] = e.what();
    }
  }
  ojson corr = correlation_json(ids, series);
  if (!errors.empty()) corr["errors"] = errors;
  if (cfg.format == OutputFormat::Json) {
    write_output(cfg.out_dir / "correlation.json", corr.dump(2) + "\n", s);
  } else {
    write_output(cfg.out_dir / "correlation.csv", correlation_csv(corr), s);
  }
  return s;
}

}  // namespace psd

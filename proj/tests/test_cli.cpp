#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "psd/io.hpp"
#include "psd/pipeline.hpp"

#ifndef PSD_CLI
#error "PSD_CLI must name the psd executable"
#endif

using namespace psd;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PSD_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path small_config(const fs::path& dir, const std::string& extra = "") {
  const fs::path p = dir / "small.cfg";
  std::ofstream(p) << "[synth]\nneutrons = 150\ngammas = 150\n[run]\nplots = false\n" << extra;
  return p;
}

}  // namespace

TEST_CASE("synth writes a dataset that loads back") {
  const fs::path dir = testutil::scratch("cli_synth");
  const fs::path cfg = small_config(dir);
  REQUIRE(run_cli("synth --config " + cfg.string() + " --seed 4 --out " + (dir / "out").string()) == 0);
  const Dataset ds = load_dataset(dir / "out" / "pulses.csv", dir / "out" / "labels.csv");
  CHECK(ds.size() == 300);
  CHECK(ds.count(Label::Neutron) == 150);
}

TEST_CASE("benchmark output is byte-identical across runs") {
  const fs::path dir = testutil::scratch("cli_det");
  const fs::path cfg = small_config(dir);
  for (const char* format : {"json", "csv"}) {
    CAPTURE(format);
    const std::string common = "benchmark --config " + cfg.string() + " --seed 9 --methods CC,PCA,SD,RCNN,KNN,MLP1:CC" +
                               " --thresholds 0,0.5 --format " + format + " --out ";
    REQUIRE(run_cli(common + (dir / "a").string()) == 0);
    REQUIRE(run_cli(common + (dir / "b").string()) == 0);
    const std::string name = std::string("report.") + format;
    const std::string a = slurp(dir / "a" / name);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / name));
  }
}

TEST_CASE("discriminate, correlate, and train write their artifacts") {
  const fs::path dir = testutil::scratch("cli_cmds");
  const fs::path cfg = small_config(dir, "[learn]\nepochs = 20\n");
  CHECK(run_cli("discriminate --config " + cfg.string() + " --methods CC,LMT --format csv --out " + (dir / "d").string()) == 0);
  const FactorSeries cc = load_factors(dir / "d" / "factors_CC.csv");
  CHECK(cc.size() > 250);
  CHECK(cc.invalid_count() == 0);

  CHECK(run_cli("correlate --config " + cfg.string() + " --methods CC,CI,LMT --out " + (dir / "c").string()) == 0);
  CHECK(fs::exists(dir / "c" / "correlation.json"));

  CHECK(run_cli("train --config " + cfg.string() + " --methods KNN,MLP1:CC --out " + (dir / "t").string()) == 0);
  CHECK(fs::exists(dir / "t" / "train_report.json"));
  CHECK(fs::exists(dir / "t" / "KNN.model.json"));
}

TEST_CASE("exit codes") {
  const fs::path dir = testutil::scratch("cli_exit");
  const fs::path cfg = small_config(dir);
  CHECK(run_cli("benchmark --config " + cfg.string() + " --methods NOPE --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("benchmark --bogus-flag") == 2);
  CHECK(run_cli("benchmark --format xml") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("discriminate --dataset " + (dir / "missing.csv").string() + " --methods CC --out " + (dir / "y").string()) == 3);
  CHECK(run_cli("discriminate --config " + cfg.string() + " --methods KNN --out " + (dir / "y").string()) == 2);

  const fs::path strict = dir / "strict.cfg";
  std::ofstream(strict) << slurp(cfg) << "[sd]\nmin_difference = 1.5\n";
  CHECK(run_cli("benchmark --config " + strict.string() + " --methods SD --out " + (dir / "z").string()) == 4);
  CHECK(run_cli("benchmark --config " + strict.string() + " --methods SD,CC --out " + (dir / "w").string()) == 0);
}

TEST_CASE("run config parsing") {
  const KeyValueConfig kv = KeyValueConfig::parse(
      "[data]\ndt = 2\n[run]\nseed = 5\nthresholds = 1, 2\nformat = csv\nmethods = statistical\n[preprocess]\nfilter = median\nwindow = 3\n");
  const RunConfig cfg = RunConfig::from_config(kv);
  CHECK(cfg.dt == 2.0);
  CHECK(cfg.seed == 5);
  CHECK(cfg.thresholds == std::vector<double>{1, 2});
  CHECK(cfg.format == OutputFormat::Csv);
  CHECK(cfg.methods.size() == 21);
  CHECK(cfg.preprocess.filter == FilterKind::Median);

  RunConfig c2;
  c2.set_methods({"CC", "CC", "MLP1:CC", "LOGRE"});
  CHECK(c2.methods == std::vector<std::string>{"CC", "MLP1:CC", "LOGRE"});
  CHECK_THROWS_AS(c2.set_methods({"CC", "XYZ"}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_config(KeyValueConfig::parse("[run]\nformat = xml\n")), ConfigError);
}

TEST_CASE("preprocessing drops corrupted pulses and applies thresholds") {
  std::vector<Eigen::VectorXd> rows;
  Rng rng(3);
  for (int i = 0; i < 10; ++i) rows.push_back(testutil::random_pulse(rng, 64));
  rows[4].segment(30, 5).setConstant(50.0);
  const Dataset ds = testutil::make_dataset(rows);
  PreprocessOptions opts;
  opts.filter.reset();
  const PreprocessResult pre = preprocess_dataset(ds, opts);
  CHECK(pre.rejected == 1);
  CHECK(pre.data.size() == 9);
  const Dataset all = select_energy(pre, std::nullopt, opts);
  for (const auto& p : all.pulses) CHECK(p.samples.maxCoeff() == doctest::Approx(1.0));
  CHECK(select_energy(pre, 1e9, opts).empty());
}

// aoselm: experiment runner.
//
//   aoselm gen     --kind sea --concept 2 --n 1000 --seed 7 --out sea2.csv
//   aoselm train   --config exp.txt --learner AOSELM2 --delta-L 50 --out runs/a
//   aoselm eval    --model runs/a/model_1_0.bin --csv test.csv --concept 1
//   aoselm bench   stagger --out runs/stagger
//   aoselm report  runs/a/report.csv runs/b/report.csv

#include <cmath>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoselm/config.hpp"
#include "aoselm/datasets.hpp"
#include "aoselm/errors.hpp"
#include "aoselm/experiment.hpp"
#include "aoselm/metrics.hpp"
#include "aoselm/serialize.hpp"

namespace {

using namespace aoselm;

// Flags that mirror ExperimentConfig keys.
struct ConfigFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::string> concepts;
  std::map<std::string, std::string> direct;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--config", f.config_file, "key=value config file");
  app->add_option("--set", f.sets, "extra key=value setting (repeatable)");
  app->add_option("--concept", f.concepts, "NAME=SOURCE[@BLOCK] (repeatable)");
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"--name", "name"},           {"--learner", "learner"},
      {"--L0", "L0"},               {"--delta-L", "delta_L"},
      {"--c", "c"},                 {"--scheme", "scheme"},
      {"--activation", "activation"}, {"--batch-size", "batch_size"},
      {"--seeds", "seeds"},         {"--schedule", "schedule"},
      {"--eval", "eval"},           {"--folds", "folds"},
      {"--trials", "trials"},       {"--test-fraction", "test_fraction"},
      {"--samples", "samples_per_concept"}, {"--sea-noise", "sea_noise"},
      {"--data-dir", "data_dir"},   {"--mnist-limit", "mnist_limit"},
      {"--trace-window", "trace_window"}};
  for (const auto& [flag, key] : keys) {
    app->add_option_function<std::string>(
        flag, [&f, key = key](const std::string& v) { f.direct[key] = v; }, "sets " + key);
  }
}

void apply_flags(ExperimentConfig& config, const ConfigFlags& f) {
  for (const auto& [key, value] : f.direct) apply_setting(config, key, value);
  for (const auto& c : f.concepts) {
    const auto eq = c.find('=');
    if (eq == std::string::npos) throw ConfigError("--concept expects NAME=SOURCE");
    apply_setting(config, "concept." + c.substr(0, eq), c.substr(eq + 1));
  }
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value");
    apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
}

void print_summary(const std::string& title, const std::vector<SummaryRow>& rows) {
  std::printf("== %s\n", title.c_str());
  for (const auto& r : rows) {
    std::printf("  %-8s %-22s %12.6g  sd %-10.4g n=%zu\n", r.concept_name.c_str(),
                r.metric.c_str(), r.mean, r.stddev, r.n);
  }
}

int run_gen(const std::string& kind, int concept_index, long long n, double noise,
            std::uint64_t seed, const std::string& fn, const std::string& out) {
  RngStream rng(seed);
  if (const auto parent = std::filesystem::path(out).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  if (kind == "sea") {
    write_csv(out, gen_sea(n, concept_index, noise, rng));
  } else if (kind == "stagger") {
    write_csv(out, gen_stagger(n, concept_index, rng));
  } else if (kind == "regression") {
    write_regression_csv(out, gen_regression(parse_regression_fn(fn), n, rng));
  } else {
    throw ConfigError("gen: unknown kind '" + kind + "' (sea, stagger, regression)");
  }
  return 0;
}

int run_eval(const std::string& model_path, const std::string& csv_path,
             const std::string& concept_arg) {
  const ElmModel model = load_model(model_path);
  std::optional<int> active;
  if (concept_arg != "all") {
    try {
      active = std::stoi(concept_arg);
    } catch (const std::exception&) {
      throw ArgumentError("eval: --concept expects an integer id or 'all'");
    }
  }

  std::ifstream probe(csv_path);
  std::string header;
  std::getline(probe, header);
  if (header.size() >= 7 && header.ends_with("target")) {
    if (!active) throw ConfigError("eval: regression data needs --concept");
    const auto data = read_regression_csv(csv_path);
    DenseMatrix X = DenseMatrix::Zero(model.d(), static_cast<Index>(data.x.size()));
    for (std::size_t i = 0; i < data.x.size(); ++i) X(0, static_cast<Index>(i)) = data.x[i];
    const auto pred = predict_regression(model, X, *active);
    double sse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sse += (pred[i] - data.y[i]) * (pred[i] - data.y[i]);
    std::printf("samples=%zu rmse=%.6f\n", pred.size(), std::sqrt(sse / static_cast<double>(pred.size())));
    return 0;
  }
  const auto data = read_csv(csv_path);
  if (data.X.rows() > model.d()) {
    throw DimensionError("eval: csv has " + std::to_string(data.X.rows()) +
                         " attributes, model accepts " + std::to_string(model.d()));
  }
  DenseMatrix X = DenseMatrix::Zero(model.d(), data.X.cols());
  X.topRows(data.X.rows()) = data.X;
  const auto pred = classify(model, X, active);
  const Index width = active ? model.block(*active).width : model.m();
  ConfusionMatrix conf(static_cast<std::size_t>(width));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (data.labels[i] >= width) throw ArgumentError("eval: label outside the concept's classes");
    conf.add(static_cast<std::size_t>(data.labels[i]), static_cast<std::size_t>(pred[i]));
  }
  std::printf("samples=%llu accuracy=%.6f", static_cast<unsigned long long>(conf.total()),
              accuracy(conf));
  try {
    const auto k = cohen_kappa(conf);
    std::printf(" kappa=%.6f kappa_error=%.6f\n", k.kappa, k.kappa_error);
  } catch (const ArgumentError&) {
    std::printf(" kappa=undefined\n");
  }
  return 0;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const VersionError*>(&e)) return "version";
  if (dynamic_cast<const ChecksumError*>(&e)) return "checksum";
  if (dynamic_cast<const FormatError*>(&e)) return "format";
  if (dynamic_cast<const SolverError*>(&e)) return "solver";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension";
  if (dynamic_cast<const UnknownConceptError*>(&e)) return "unknown-concept";
  if (dynamic_cast<const ArgumentError*>(&e)) return "argument";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive online sequential ELM experiments"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "emit a synthetic dataset as CSV");
  std::string gen_kind = "sea", gen_fn = "sinc", gen_out;
  int gen_concept = 1;
  long long gen_n = 1000;
  double gen_noise = 0.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("--kind", gen_kind, "sea, stagger or regression");
  gen->add_option("--concept", gen_concept, "concept index");
  gen->add_option("--n", gen_n, "sample count");
  gen->add_option("--noise", gen_noise, "SEA label noise fraction");
  gen->add_option("--fn", gen_fn, "regression function: sinc, sinus, gaussian");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output CSV")->required();

  auto* train = app.add_subcommand("train", "run a drift schedule and save models and traces");
  ConfigFlags train_flags;
  std::string train_out;
  add_config_flags(train, train_flags);
  train->add_option("--out", train_out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "score a saved model on a CSV file");
  std::string eval_model, eval_csv, eval_concept = "all";
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--csv", eval_csv, "CSV file")->required();
  eval->add_option("--concept", eval_concept, "concept id or 'all'");

  auto* bench = app.add_subcommand("bench", "run a named benchmark");
  std::string bench_name, bench_out;
  bool bench_full = false;
  ConfigFlags bench_flags;
  bench->add_option("benchmark", bench_name, "sea, stagger, mnist-vd, mnist-rd, mnist-hd, regression-rd")
      ->required();
  bench->add_flag("--full", bench_full, "large-scale parameters");
  bench->add_option("--out", bench_out, "output directory");
  add_config_flags(bench, bench_flags);

  auto* report = app.add_subcommand("report", "aggregate report.csv files (mean, std, n)");
  std::vector<std::string> report_inputs;
  std::string report_out;
  report->add_option("inputs", report_inputs, "report.csv files")->required();
  report->add_option("--out", report_out, "summary CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) return run_gen(gen_kind, gen_concept, gen_n, gen_noise, gen_seed, gen_fn, gen_out);
    if (*train) {
      ExperimentConfig config;
      if (!train_flags.config_file.empty()) config = load_config_file(train_flags.config_file);
      apply_flags(config, train_flags);
      const auto result = run_experiment(config);
      write_report(result, train_out);
      print_summary(config.name, summarize(result.rows));
      return 0;
    }
    if (*eval) return run_eval(eval_model, eval_csv, eval_concept);
    if (*bench) {
      for (auto config : bench_preset(bench_name, bench_full)) {
        if (!bench_flags.config_file.empty()) config = load_config_file(bench_flags.config_file, config);
        apply_flags(config, bench_flags);
        const auto result = run_experiment(config);
        if (!bench_out.empty()) write_report(result, std::filesystem::path(bench_out) / config.name);
        print_summary(config.name, summarize(result.rows));
      }
      return 0;
    }
    if (*report) {
      std::vector<ReportRow> rows;
      for (const auto& in : report_inputs) {
        auto part = read_report_csv(in);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const auto summary = summarize(rows);
      if (!report_out.empty()) write_summary_csv(report_out, summary);
      print_summary("summary", summary);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error kind=%s message=\"%s\"\n", error_kind(e), e.what());
    return dynamic_cast<const ConfigError*>(&e) ? 2 : 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoselm/datasets.hpp"
#include "aoselm/model.hpp"
#include "aoselm/monitor.hpp"

namespace aoselm {

enum class Learner { OSELM, CEOSELM, AOSELM1, AOSELM2 };
enum class EvalProtocol { Holdout, KFold };

std::string_view to_string(Learner l);
std::string_view to_string(EvalProtocol p);
Learner parse_learner(std::string_view s);
EvalProtocol parse_eval_protocol(std::string_view s);

/// Named concept and its data source:
///   sea:<1..4>                   SEA concept
///   stagger:<1..3>               STAGGER concept
///   regression:<sinc|sinus|gaussian>
///   mnist:<grey|grey+hog>:<lo>-<hi>   digits lo..hi of the IDX data
///   csv:<path>                   labelled CSV file
/// MNIST concepts with the same digit range draw from one shared sample
/// sequence. The output block defaults to the digit range for MNIST and to
/// the concept itself otherwise; `block` overrides it.
struct ConceptDef {
  std::string name;
  std::string source;
  std::string block;
};

/// Sample amount of a schedule entry: an integer count or, when written with
/// a decimal point, a fraction of the concept's training pool.
struct Amount {
  bool fraction = false;
  double value = 0.0;
};

struct ScheduleItem {
  std::string concept_name;
  std::optional<Amount> amount;  // absent: everything left
};

struct ParsedSegment {
  std::vector<ScheduleItem> items;  // several items: shuffled(...)
  DriftType drift = DriftType::None;
};

/// Parses e.g. "C1[0.5] >>RD shuffled(C1, C2) >>VD C3[2000]". A bare ">>"
/// continues without a drift transition.
std::vector<ParsedSegment> parse_schedule(std::string_view text);
std::string format_schedule(const std::vector<ParsedSegment>& schedule);

struct ExperimentConfig {
  std::string name = "experiment";
  Learner learner = Learner::AOSELM1;
  Index L0 = 500;
  Index delta_L = 0;
  double c = 10.0;
  InitScheme scheme = InitScheme::Ros;
  Activation activation = Activation::Sigmoid;
  Index batch_size = 1000;
  std::vector<std::uint64_t> seeds{1};

  std::vector<ConceptDef> concepts;
  std::string schedule;

  EvalProtocol eval = EvalProtocol::Holdout;
  int folds = 5;
  int trials = 1;              // holdout repetitions per seed
  double test_fraction = 0.2;  // holdout only

  Index samples_per_concept = 1000;  // synthetic concepts, before the test split
  double sea_noise = 0.0;
  std::string data_dir = "data/mnist";
  Index mnist_limit = 10000;  // 0 keeps every image in the file

  MonitorParams monitor;
  std::size_t trace_window = 500;
  bool rank_diagnostics = true;

  bool gain_fit = true;
  Index calibration_size = 1000;
};

/// Applies one key=value setting. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads key=value lines; '#' starts a comment.
void apply_config_text(ExperimentConfig& config, std::string_view text);
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Every setting as key=value lines, readable by apply_config_text.
std::string format_config(const ExperimentConfig& config);

/// Throws ConfigError describing the first violated constraint.
void validate(const ExperimentConfig& config);

}  // namespace aoselm

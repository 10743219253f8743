#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aoselm/config.hpp"
#include "aoselm/metrics.hpp"
#include "aoselm/model.hpp"
#include "aoselm/monitor.hpp"

namespace aoselm {

struct ReportRow {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string concept_name;  // "*" for trial-wide metrics
  std::string metric;
  double value = 0.0;
};

/// rank(P) around one growth step.
struct RankRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t position = 0;
  Index L_before = 0;
  Index delta_L = 0;
  Index batch = 0;
  std::size_t rank_before = 0;
  std::size_t rank_after = 0;
  bool flagged = false;
  bool solver_failed = false;  // growth rejected, batch trained without it
};

struct MonitorEvent {
  int trial = 0;
  std::uint64_t seed = 0;
  std::size_t position = 0;
  MonitorState state = MonitorState::Stable;
};

struct TrialTrace {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<TracePoint> points;
};

struct TrialModel {
  int trial = 0;
  std::uint64_t seed = 0;
  ElmModel model;
};

/// Everything an experiment produced. Rows are ordered by seed, then trial,
/// then concept definition order.
struct Report {
  ExperimentConfig config;
  std::string protocol;  // how train and test data were separated
  std::vector<ReportRow> rows;
  std::vector<RankRecord> ranks;
  std::vector<MonitorEvent> events;
  std::vector<TrialTrace> traces;
  std::vector<TrialModel> models;

  std::vector<double> values(const std::string& concept_name, const std::string& metric) const;
  /// Mean over trials; NaN when absent.
  double mean(const std::string& concept_name, const std::string& metric) const;
};

/// Trials per seed implied by the evaluation protocol.
int trial_count(const ExperimentConfig& config);

/// Runs every (seed, trial): builds the concept pools, streams the schedule
/// prequentially (predict, observe, train, adapt at drift markers), then
/// scores each scheduled concept on its held-out samples with the final model.
Report run_experiment(const ExperimentConfig& config);

/// Writes report.csv, trace_<seed>_<trial>.csv, model_<seed>_<trial>.bin,
/// ranks.csv, events.csv and config_resolved.txt under `dir`.
void write_report(const Report& report, const std::filesystem::path& dir);

/// Named benchmark variants: sea, stagger, mnist-vd, mnist-rd, mnist-hd,
/// regression-rd. `full` restores the large-scale parameters.
std::vector<ExperimentConfig> bench_preset(const std::string& name, bool full = false);
std::vector<std::string> bench_names();

struct SummaryRow {
  std::string concept_name;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t n = 0;
};

/// Groups report.csv rows by (concept, metric).
std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

}  // namespace aoselm

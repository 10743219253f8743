#pragma once

#include <cstddef>
#include <deque>
#include <utility>
#include <string_view>
#include <vector>

#include "aoselm/model.hpp"

namespace aoselm {

enum class MonitorState { Stable, Warning, Drift };

std::string_view to_string(MonitorState s);

struct MonitorParams {
  std::size_t window = 200;
  std::size_t warn_threshold = 30;  // consecutive misses
  double drift_threshold = 0.2;     // absolute drop in windowed accuracy
};

/// Windowed loss estimator.
///
/// Best accuracy and the drop test only use full windows. A drop seen while
/// STABLE raises WARNING; a drop that persists into the next observation while
/// in WARNING raises DRIFT. WARNING clears back to STABLE once neither the
/// miss run nor the drop condition holds. DRIFT is sticky until acknowledge().
class DriftMonitor {
public:
  explicit DriftMonitor(MonitorParams params = {});

  MonitorState observe(bool correct);

  /// Handles a DRIFT: clears the window, miss counter and best accuracy.
  void acknowledge();
  void reset() { acknowledge(); }

  MonitorState state() const noexcept { return state_; }
  const MonitorParams& params() const noexcept { return params_; }
  double best_accuracy() const noexcept { return best_acc_; }
  std::size_t consecutive_misses() const noexcept { return consec_miss_; }
  std::size_t size() const noexcept { return recent_.size(); }
  /// Accuracy over the current (possibly partial) window; 0 when empty.
  double windowed_accuracy() const noexcept;

private:
  MonitorParams params_;
  std::deque<bool> recent_;
  std::size_t hits_ = 0;
  std::size_t consec_miss_ = 0;
  double best_acc_ = 0.0;
  MonitorState state_ = MonitorState::Stable;
};

/// Full model copy tagged with the stream position it was taken at.
class ModelSnapshot {
public:
  ModelSnapshot(ElmModel model, std::size_t position)
      : model_(std::move(model)), position_(position) {}

  const ElmModel& model() const noexcept { return model_; }
  std::size_t position() const noexcept { return position_; }

private:
  ElmModel model_;
  std::size_t position_;
};

/// First index where trace_new >= trace_prev; trace_prev.size() when none.
std::size_t change_point_estimate(const std::vector<double>& trace_prev,
                                  const std::vector<double>& trace_new);

/// Candidate when cand_acc >= prev_acc - margin, otherwise the snapshot's model.
ElmModel commit_or_rollback(const ModelSnapshot& snapshot, ElmModel candidate, double cand_acc,
                            double prev_acc, double margin = 0.0);

}  // namespace aoselm

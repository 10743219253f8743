#include "aoselm/monitor.hpp"

#include <algorithm>

#include "aoselm/errors.hpp"

namespace aoselm {

std::string_view to_string(MonitorState s) {
  switch (s) {
    case MonitorState::Stable: return "STABLE";
    case MonitorState::Warning: return "WARNING";
    case MonitorState::Drift: return "DRIFT";
  }
  return "?";
}

DriftMonitor::DriftMonitor(MonitorParams params) : params_(params) {
  if (params_.window == 0) throw ArgumentError("DriftMonitor: window must be at least 1");
  if (params_.warn_threshold == 0) {
    throw ArgumentError("DriftMonitor: warn_threshold must be at least 1");
  }
  if (!(params_.drift_threshold > 0.0) || params_.drift_threshold > 1.0) {
    throw ArgumentError("DriftMonitor: drift_threshold must lie in (0, 1]");
  }
}

double DriftMonitor::windowed_accuracy() const noexcept {
  return recent_.empty() ? 0.0
                         : static_cast<double>(hits_) / static_cast<double>(recent_.size());
}

MonitorState DriftMonitor::observe(bool correct) {
  recent_.push_back(correct);
  if (correct) {
    ++hits_;
    consec_miss_ = 0;
  } else {
    ++consec_miss_;
  }
  if (recent_.size() > params_.window) {
    if (recent_.front()) --hits_;
    recent_.pop_front();
  }
  if (state_ == MonitorState::Drift) return state_;

  bool dropped = false;
  if (recent_.size() == params_.window) {
    const double acc = windowed_accuracy();
    best_acc_ = std::max(best_acc_, acc);
    dropped = acc < best_acc_ - params_.drift_threshold;
  }
  const bool missing = consec_miss_ >= params_.warn_threshold;

  if (state_ == MonitorState::Warning && dropped) {
    state_ = MonitorState::Drift;
  } else if (dropped || missing) {
    state_ = MonitorState::Warning;
  } else {
    state_ = MonitorState::Stable;
  }
  return state_;
}

void DriftMonitor::acknowledge() {
  recent_.clear();
  hits_ = 0;
  consec_miss_ = 0;
  best_acc_ = 0.0;
  state_ = MonitorState::Stable;
}

std::size_t change_point_estimate(const std::vector<double>& trace_prev,
                                  const std::vector<double>& trace_new) {
  if (trace_prev.empty() || trace_new.empty()) {
    throw ArgumentError("change_point_estimate: empty series");
  }
  if (trace_prev.size() != trace_new.size()) {
    throw DimensionError("change_point_estimate: series lengths differ");
  }
  for (std::size_t i = 0; i < trace_prev.size(); ++i) {
    if (trace_new[i] >= trace_prev[i]) return i;
  }
  return trace_prev.size();
}

ElmModel commit_or_rollback(const ModelSnapshot& snapshot, ElmModel candidate, double cand_acc,
                            double prev_acc, double margin) {
  if (cand_acc < 0.0 || cand_acc > 1.0 || prev_acc < 0.0 || prev_acc > 1.0) {
    throw ArgumentError("commit_or_rollback: accuracies must lie in [0, 1]");
  }
  if (cand_acc >= prev_acc - margin) return candidate;
  return snapshot.model();
}

}  // namespace aoselm

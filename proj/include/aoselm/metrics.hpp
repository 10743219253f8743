#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <vector>

namespace aoselm {

/// m x m counts, rows = truth, columns = prediction.
class ConfusionMatrix {
public:
  explicit ConfusionMatrix(std::size_t classes);
  ConfusionMatrix(std::initializer_list<std::initializer_list<std::uint64_t>> rows);

  void add(std::size_t truth, std::size_t predicted, std::uint64_t count = 1);

  std::size_t classes() const noexcept { return m_; }
  std::uint64_t count(std::size_t truth, std::size_t predicted) const;
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t trace() const noexcept;

private:
  std::size_t m_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

double accuracy(const ConfusionMatrix& conf);

struct KappaResult {
  double kappa = 0.0;
  double kappa_error = 0.0;  // standard error sqrt(po(1-po) / (N (1-pe)^2))
};

/// Throws ArgumentError when the matrix is empty or chance agreement is 1.
KappaResult cohen_kappa(const ConfusionMatrix& conf);

struct TracePoint {
  std::size_t position = 0;  // samples seen so far
  double accuracy = 0.0;
};

/// Prequential accuracy over consecutive windows of `window` outcomes. A
/// trailing partial window is reported by finish(), so N outcomes give
/// ceil(N / window) points.
class PrequentialTrace {
public:
  explicit PrequentialTrace(std::size_t window = 500);

  void add(bool correct);
  void finish();

  const std::vector<TracePoint>& points() const noexcept { return points_; }
  std::size_t window() const noexcept { return window_; }
  std::size_t seen() const noexcept { return seen_; }

private:
  std::size_t window_;
  std::size_t seen_ = 0;
  std::size_t hits_ = 0;
  std::size_t in_window_ = 0;
  std::vector<TracePoint> points_;
};

/// Header `position,accuracy`.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& points);

/// acc_latest - acc_prev for every previous concept.
std::vector<double> forgetting_capability(double acc_latest,
                                          const std::vector<double>& acc_previous);

}  // namespace aoselm

#include "aoselm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include "aoselm/errors.hpp"

namespace aoselm {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : m_(classes), counts_(classes * classes, 0) {
  if (classes == 0) throw ArgumentError("ConfusionMatrix: needs at least one class");
}

ConfusionMatrix::ConfusionMatrix(std::initializer_list<std::initializer_list<std::uint64_t>> rows)
    : ConfusionMatrix(rows.size()) {
  std::size_t t = 0;
  for (const auto& row : rows) {
    if (row.size() != m_) throw DimensionError("ConfusionMatrix: rows must be square");
    std::size_t p = 0;
    for (auto v : row) add(t, p++, v);
    ++t;
  }
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t count) {
  if (truth >= m_ || predicted >= m_) {
    throw ArgumentError("ConfusionMatrix: class index out of range");
  }
  counts_[truth * m_ + predicted] += count;
  total_ += count;
}

std::uint64_t ConfusionMatrix::count(std::size_t truth, std::size_t predicted) const {
  if (truth >= m_ || predicted >= m_) {
    throw ArgumentError("ConfusionMatrix: class index out of range");
  }
  return counts_[truth * m_ + predicted];
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < m_; ++i) t += counts_[i * m_ + i];
  return t;
}

double accuracy(const ConfusionMatrix& conf) {
  if (conf.total() == 0) throw ArgumentError("accuracy: empty confusion matrix");
  return static_cast<double>(conf.trace()) / static_cast<double>(conf.total());
}

KappaResult cohen_kappa(const ConfusionMatrix& conf) {
  if (conf.total() == 0) throw ArgumentError("cohen_kappa: empty confusion matrix");
  const auto n = static_cast<double>(conf.total());
  const std::size_t m = conf.classes();
  double pe = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      row += static_cast<double>(conf.count(k, j));
      col += static_cast<double>(conf.count(j, k));
    }
    pe += (row / n) * (col / n);
  }
  if (pe >= 1.0) {
    throw ArgumentError("cohen_kappa: undefined, chance agreement is 1");
  }
  const double po = static_cast<double>(conf.trace()) / n;
  KappaResult r;
  r.kappa = (po - pe) / (1.0 - pe);
  r.kappa_error = std::sqrt(po * (1.0 - po) / (n * (1.0 - pe) * (1.0 - pe)));
  return r;
}

PrequentialTrace::PrequentialTrace(std::size_t window) : window_(window) {
  if (window == 0) throw ArgumentError("PrequentialTrace: window must be at least 1");
}

void PrequentialTrace::add(bool correct) {
  ++seen_;
  ++in_window_;
  if (correct) ++hits_;
  if (in_window_ == window_) {
    points_.push_back({seen_, static_cast<double>(hits_) / static_cast<double>(in_window_)});
    hits_ = 0;
    in_window_ = 0;
  }
}

void PrequentialTrace::finish() {
  if (in_window_ > 0) {
    points_.push_back({seen_, static_cast<double>(hits_) / static_cast<double>(in_window_)});
    hits_ = 0;
    in_window_ = 0;
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TracePoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << "position,accuracy\n" << std::setprecision(10);
  for (const auto& p : points) out << p.position << ',' << p.accuracy << '\n';
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

std::vector<double> forgetting_capability(double acc_latest,
                                          const std::vector<double>& acc_previous) {
  auto in_range = [](double a) { return a >= 0.0 && a <= 1.0; };
  if (!in_range(acc_latest)) throw ArgumentError("forgetting_capability: accuracy outside [0, 1]");
  std::vector<double> out;
  out.reserve(acc_previous.size());
  for (double a : acc_previous) {
    if (!in_range(a)) throw ArgumentError("forgetting_capability: accuracy outside [0, 1]");
    out.push_back(acc_latest - a);
  }
  return out;
}

}  // namespace aoselm

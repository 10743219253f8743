#include "aoselm/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "aoselm/errors.hpp"

namespace aoselm {

DenseMatrix one_hot(const std::vector<int>& labels, Index classes) {
  DenseMatrix t = DenseMatrix::Zero(static_cast<Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      throw ArgumentError("one_hot: label " + std::to_string(labels[i]) + " outside [0, " +
                          std::to_string(classes) + ")");
    }
    t(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return t;
}

LabeledSamples gen_sea(Index n, int concept_index, double noise_fraction, RngStream& rng) {
  if (concept_index < 1 || concept_index > 4) {
    throw ArgumentError("gen_sea: concept index must be 1..4");
  }
  if (n < 1) throw ArgumentError("gen_sea: n must be at least 1");
  if (!(noise_fraction >= 0.0 && noise_fraction <= 0.5)) {
    throw ArgumentError("gen_sea: noise fraction must lie in [0, 0.5]");
  }
  const double theta = kSeaThresholds[static_cast<std::size_t>(concept_index - 1)];
  LabeledSamples out{DenseMatrix(3, n), std::vector<int>(static_cast<std::size_t>(n)), {}};
  for (Index i = 0; i < n; ++i) {
    std::array<double, 3> raw{};
    for (int j = 0; j < 3; ++j) {
      raw[static_cast<std::size_t>(j)] = static_cast<double>(rng.below(10));
      out.X(j, i) = raw[static_cast<std::size_t>(j)] / 9.0 * 2.0 - 1.0;
    }
    int label = raw[0] + raw[1] <= theta ? 1 : 0;
    if (rng.uniform01() < noise_fraction) label = 1 - label;
    out.labels[static_cast<std::size_t>(i)] = label;
  }
  return out;
}

bool stagger_rule(int concept_index, int color, int size, int shape) {
  switch (concept_index) {
    case 1: return color == 0 && size == 0;
    case 2: return color == 1 || shape == 0;
    case 3: return size == 1 || size == 2;
    default: throw ArgumentError("stagger_rule: concept index must be 1..3");
  }
}

LabeledSamples gen_stagger(Index n, int concept_index, RngStream& rng) {
  if (concept_index < 1 || concept_index > 3) {
    throw ArgumentError("gen_stagger: concept index must be 1..3");
  }
  if (n < 1) throw ArgumentError("gen_stagger: n must be at least 1");
  LabeledSamples out{DenseMatrix::Constant(9, n, -1.0),
                     std::vector<int>(static_cast<std::size_t>(n)), {}};
  for (Index i = 0; i < n; ++i) {
    std::array<int, 3> a{};
    for (int j = 0; j < 3; ++j) {
      a[static_cast<std::size_t>(j)] = static_cast<int>(rng.below(3));
      out.X(3 * j + a[static_cast<std::size_t>(j)], i) = 1.0;
    }
    out.labels[static_cast<std::size_t>(i)] = stagger_rule(concept_index, a[0], a[1], a[2]) ? 1 : 0;
  }
  return out;
}

std::string_view to_string(RegressionFn fn) {
  switch (fn) {
    case RegressionFn::Sinc: return "sinc";
    case RegressionFn::Sinus: return "sinus";
    case RegressionFn::Gaussian: return "gaussian";
  }
  return "?";
}

RegressionFn parse_regression_fn(std::string_view s) {
  if (s == "sinc") return RegressionFn::Sinc;
  if (s == "sinus" || s == "sin") return RegressionFn::Sinus;
  if (s == "gaussian" || s == "gauss") return RegressionFn::Gaussian;
  throw ArgumentError("unknown regression function '" + std::string(s) + "'");
}

namespace {

// Global minimum of sin(u)/u, attained near u = 4.4934.
constexpr double kSincMin = -0.21723362821122166;

}  // namespace

double regression_target(RegressionFn fn, double x) {
  using std::numbers::pi;
  switch (fn) {
    case RegressionFn::Sinc: {
      const double u = 4.0 * pi * x;
      const double raw = u == 0.0 ? 1.0 : std::sin(u) / u;
      return (raw - kSincMin) / (1.0 - kSincMin);
    }
    case RegressionFn::Sinus:
      return 0.5 * (std::sin(2.0 * pi * x) + 1.0);
    case RegressionFn::Gaussian: {
      const double floor = std::exp(-8.0);
      return (std::exp(-8.0 * x * x) - floor) / (1.0 - floor);
    }
  }
  return 0.0;
}

RegressionSamples gen_regression(RegressionFn fn, Index n, RngStream& rng) {
  if (n < 1) throw ArgumentError("gen_regression: n must be at least 1");
  RegressionSamples out;
  out.x.reserve(static_cast<std::size_t>(n));
  out.y.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    out.x.push_back(x);
    out.y.push_back(regression_target(fn, x));
  }
  return out;
}

std::string_view to_string(DriftType t) {
  switch (t) {
    case DriftType::None: return "none";
    case DriftType::VD: return "VD";
    case DriftType::RD: return "RD";
    case DriftType::HD: return "HD";
  }
  return "?";
}

std::string_view to_string(DriftKind k) {
  return k == DriftKind::Sudden ? "sudden" : "recurring-shuffled";
}

DriftType parse_drift_type(std::string_view s) {
  if (s == "VD" || s == "vd") return DriftType::VD;
  if (s == "RD" || s == "rd") return DriftType::RD;
  if (s == "HD" || s == "hd") return DriftType::HD;
  if (s == "none" || s.empty()) return DriftType::None;
  throw ArgumentError("unknown drift type '" + std::string(s) + "'");
}

std::vector<StreamBatch> compose_schedule(const std::vector<ConceptPool>& pools,
                                          const std::vector<ScheduleSegment>& schedule,
                                          Index batch_size, RngStream& rng) {
  if (schedule.empty()) throw ArgumentError("compose_schedule: empty schedule");
  if (batch_size < 1) throw ArgumentError("compose_schedule: batch size must be at least 1");

  auto source_of = [&](std::size_t p) {
    return pools[p].source < 0 ? p : static_cast<std::size_t>(pools[p].source);
  };
  std::vector<Index> cursor(pools.size(), 0);
  for (std::size_t p = 0; p < pools.size(); ++p) {
    if (source_of(p) >= pools.size() ||
        pools[source_of(p)].samples.size() != pools[p].samples.size()) {
      throw ConfigError("compose_schedule: pool '" + pools[p].name +
                        "' shares a source of a different length");
    }
  }
  std::set<std::size_t> seen_pools;
  Index width = 0;
  std::size_t position = 0;
  std::vector<StreamBatch> out;

  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const auto& seg = schedule[s];
    if (seg.pools.empty() || seg.pools.size() != seg.counts.size()) {
      throw ConfigError("compose_schedule: segment " + std::to_string(s) +
                        " needs one count per concept");
    }

    // (pool, sample index) in stream order.
    std::vector<std::pair<std::size_t, Index>> order;
    Index seg_width = width;
    std::vector<std::size_t> new_pools;
    for (std::size_t k = 0; k < seg.pools.size(); ++k) {
      const std::size_t p = seg.pools[k];
      if (p >= pools.size()) {
        throw ConfigError("compose_schedule: unknown concept index " + std::to_string(p));
      }
      const std::size_t src = source_of(p);
      const Index count = seg.counts[k];
      if (count < 0 || cursor[src] + count > pools[p].samples.size()) {
        throw ConfigError("compose_schedule: concept '" + pools[p].name + "' has " +
                          std::to_string(pools[p].samples.size() - cursor[src]) +
                          " samples left, segment asks for " + std::to_string(count));
      }
      for (Index i = 0; i < count; ++i) order.emplace_back(p, cursor[src] + i);
      cursor[src] += count;
      seg_width = std::max(seg_width, pools[p].samples.X.rows());
      if (!seen_pools.contains(p) &&
          std::find(new_pools.begin(), new_pools.end(), p) == new_pools.end()) {
        new_pools.push_back(p);
      }
    }
    if (order.empty()) continue;

    if (s > 0 && seg_width > width && seg.drift != DriftType::VD && seg.drift != DriftType::HD) {
      throw ConfigError("compose_schedule: segment " + std::to_string(s) +
                        " widens the input without a VD or HD transition");
    }
    width = seg_width;
    seen_pools.insert(new_pools.begin(), new_pools.end());

    const DriftKind kind = seg.pools.size() > 1 ? DriftKind::RecurringShuffled : DriftKind::Sudden;
    if (kind == DriftKind::RecurringShuffled) {
      const auto perm = random_permutation(rng, order.size());
      std::vector<std::pair<std::size_t, Index>> shuffled(order.size());
      for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = order[perm[i]];
      order = std::move(shuffled);
    }

    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
      const std::size_t n = std::min(order.size() - start, static_cast<std::size_t>(batch_size));
      StreamBatch batch;
      batch.X = DenseMatrix::Zero(width, static_cast<Index>(n));
      batch.pool.resize(n);
      batch.labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto [p, idx] = order[start + i];
        const auto& src = pools[p].samples;
        batch.X.col(static_cast<Index>(i)).head(src.X.rows()) = src.X.col(idx);
        batch.pool[i] = static_cast<int>(p);
        if (!src.labels.empty()) batch.labels[i] = src.labels[static_cast<std::size_t>(idx)];
        if (!src.targets.empty()) batch.targets.push_back(src.targets[static_cast<std::size_t>(idx)]);
      }
      batch.segment = s;
      batch.position = position;
      if (start == 0 && s > 0) {
        batch.marker = DriftMarker{seg.drift, kind, width, new_pools, s};
      }
      position += n;
      out.push_back(std::move(batch));
    }
  }
  return out;
}

namespace {

std::uint32_t read_be32(std::span<const unsigned char> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

IdxData parse_idx(std::span<const unsigned char> bytes) {
  if (bytes.size() < 8) throw FormatError("idx: file shorter than its header");
  const std::uint32_t magic = read_be32(bytes, 0);
  const std::uint64_t count = read_be32(bytes, 4);
  if (magic == 0x00000801) {
    if (bytes.size() != 8 + count) {
      throw FormatError("idx: label payload has " + std::to_string(bytes.size() - 8) +
                        " bytes, header declares " + std::to_string(count));
    }
    IdxLabels out;
    out.labels.assign(bytes.begin() + 8, bytes.end());
    return out;
  }
  if (magic == 0x00000803) {
    if (bytes.size() < 16) throw FormatError("idx: image header truncated");
    const std::uint64_t rows = read_be32(bytes, 8);
    const std::uint64_t cols = read_be32(bytes, 12);
    const std::uint64_t pixels = rows * cols;
    if (rows == 0 || cols == 0 || rows > 65536 || cols > 65536 ||
        count > (std::uint64_t{1} << 40) / pixels) {
      throw FormatError("idx: image dimensions out of range");
    }
    if (bytes.size() - 16 != count * pixels) {
      throw FormatError("idx: image payload has " + std::to_string(bytes.size() - 16) +
                        " bytes, header declares " + std::to_string(count * pixels));
    }
    IdxImages out;
    out.rows = static_cast<Index>(rows);
    out.cols = static_cast<Index>(cols);
    out.X.resize(static_cast<Index>(pixels), static_cast<Index>(count));
    for (std::uint64_t n = 0; n < count; ++n) {
      for (std::uint64_t j = 0; j < pixels; ++j) {
        out.X(static_cast<Index>(j), static_cast<Index>(n)) =
            static_cast<double>(bytes[16 + n * pixels + j]) / 255.0 * 2.0 - 1.0;
      }
    }
    return out;
  }
  std::ostringstream msg;
  msg << "idx: bad magic 0x" << std::hex << std::setw(8) << std::setfill('0') << magic;
  throw FormatError(msg.str());
}

IdxData load_idx(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return parse_idx(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

IdxImages load_idx_images(const std::filesystem::path& path) {
  auto data = load_idx(path);
  if (auto* images = std::get_if<IdxImages>(&data)) return std::move(*images);
  throw FormatError(path.string() + ": expected an IDX image file");
}

IdxLabels load_idx_labels(const std::filesystem::path& path) {
  auto data = load_idx(path);
  if (auto* labels = std::get_if<IdxLabels>(&data)) return std::move(*labels);
  throw FormatError(path.string() + ": expected an IDX label file");
}

Vector hog_features(std::span<const double> image) {
  constexpr int side = 28;
  constexpr int cell = 9;
  constexpr int bins = 9;
  if (image.size() != static_cast<std::size_t>(side * side)) {
    throw DimensionError("hog_features: image must have 784 pixels, got " +
                         std::to_string(image.size()));
  }
  auto px = [&](int r, int c) {
    r = std::clamp(r, 0, side - 1);
    c = std::clamp(c, 0, side - 1);
    return image[static_cast<std::size_t>(r * side + c)];
  };
  Vector h = Vector::Zero(kHogFeatures);
  for (int r = 0; r < 3 * cell; ++r) {
    for (int c = 0; c < 3 * cell; ++c) {
      const double gx = px(r, c + 1) - px(r, c - 1);
      const double gy = px(r + 1, c) - px(r - 1, c);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += std::numbers::pi;
      const int bin = std::min(static_cast<int>(theta / (std::numbers::pi / bins)), bins - 1);
      h(((r / cell) * 3 + c / cell) * bins + bin) += mag;
    }
  }
  constexpr double eps = 1e-6;
  const double norm = std::sqrt(h.squaredNorm() + eps * eps);
  return (h / norm * 9.0).cwiseMin(1.0).cwiseMax(-1.0);
}

DenseMatrix hog_matrix(const DenseMatrix& images) {
  if (images.rows() != 784) {
    throw DimensionError("hog_matrix: expected 784 rows, got " + std::to_string(images.rows()));
  }
  DenseMatrix out(kHogFeatures, images.cols());
  std::vector<double> buf(784);
  for (Index n = 0; n < images.cols(); ++n) {
    for (Index j = 0; j < 784; ++j) buf[static_cast<std::size_t>(j)] = images(j, n);
    out.col(n) = hog_features(buf);
  }
  return out;
}

DenseMatrix augment_noise(const DenseMatrix& images, NoiseKind kind, double param,
                          RngStream& rng) {
  DenseMatrix out = images;
  if (kind == NoiseKind::Gaussian) {
    if (!(param >= 0.0) || !std::isfinite(param)) {
      throw ArgumentError("augment_noise: gaussian sigma must be non-negative");
    }
    if (param == 0.0) return out;
    for (Index i = 0; i < out.rows(); ++i) {
      for (Index j = 0; j < out.cols(); ++j) {
        out(i, j) = std::clamp(out(i, j) + param * rng.normal(), -1.0, 1.0);
      }
    }
  } else {
    if (!(param >= 0.0 && param <= 1.0)) {
      throw ArgumentError("augment_noise: salt-pepper fraction must lie in [0, 1]");
    }
    for (Index i = 0; i < out.rows(); ++i) {
      for (Index j = 0; j < out.cols(); ++j) {
        if (rng.uniform01() < param) out(i, j) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      }
    }
  }
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw FormatError("csv line " + std::to_string(line_no) + ": bad number '" +
                      std::string(field) + "'");
  }
  return v;
}

struct CsvTable {
  Index d = 0;
  std::vector<double> features;
  std::vector<double> last_values;
  std::vector<int> last_ints;
};

void read_table(const std::filesystem::path& path, std::string_view last_name, bool integer_last,
                CsvTable& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() < 2 || header.back() != last_name) {
    throw FormatError(path.string() + ": header must be f0,...,f{d-1}," + std::string(last_name));
  }
  table.d = static_cast<Index>(header.size() - 1);
  for (Index j = 0; j < table.d; ++j) {
    if (header[static_cast<std::size_t>(j)] != "f" + std::to_string(j)) {
      throw FormatError(path.string() + ": header column " + std::to_string(j) + " must be f" +
                        std::to_string(j));
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(header.size()));
    }
    for (Index j = 0; j < table.d; ++j) {
      table.features.push_back(parse_double(fields[static_cast<std::size_t>(j)], line_no));
    }
    if (integer_last) {
      int v = 0;
      const auto f = fields.back();
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || v < 0) {
        throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                          ": label must be a non-negative integer");
      }
      table.last_ints.push_back(v);
    } else {
      table.last_values.push_back(parse_double(fields.back(), line_no));
    }
  }
}

void write_header(std::ostream& out, Index d, std::string_view last) {
  for (Index j = 0; j < d; ++j) out << 'f' << j << ',';
  out << last << '\n';
}

}  // namespace

void write_csv(const std::filesystem::path& path, const LabeledSamples& data) {
  if (static_cast<Index>(data.labels.size()) != data.X.cols()) {
    throw DimensionError("write_csv: label count differs from sample count");
  }
  auto out = open_out(path);
  write_header(out, data.X.rows(), "label");
  for (Index n = 0; n < data.X.cols(); ++n) {
    for (Index j = 0; j < data.X.rows(); ++j) out << data.X(j, n) << ',';
    out << data.labels[static_cast<std::size_t>(n)] << '\n';
  }
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

LabeledSamples read_csv(const std::filesystem::path& path) {
  CsvTable table;
  read_table(path, "label", true, table);
  const auto n = static_cast<Index>(table.last_ints.size());
  LabeledSamples out;
  out.X = Eigen::Map<const DenseMatrix>(table.features.data(), n, table.d).transpose();
  out.labels = std::move(table.last_ints);
  return out;
}

void write_regression_csv(const std::filesystem::path& path, const RegressionSamples& data) {
  if (data.x.size() != data.y.size()) {
    throw DimensionError("write_regression_csv: x and y lengths differ");
  }
  auto out = open_out(path);
  write_header(out, 1, "target");
  for (std::size_t i = 0; i < data.x.size(); ++i) out << data.x[i] << ',' << data.y[i] << '\n';
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

RegressionSamples read_regression_csv(const std::filesystem::path& path) {
  CsvTable table;
  read_table(path, "target", false, table);
  if (table.d != 1) throw FormatError(path.string() + ": regression csv must have one feature");
  return RegressionSamples{std::move(table.features), std::move(table.last_values)};
}

}  // namespace aoselm

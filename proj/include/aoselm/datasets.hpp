#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aoselm/model.hpp"
#include "aoselm/rng.hpp"

namespace aoselm {

/// Inputs (d x N, column per sample) with integer class labels, or real
/// targets for regression data (labels then unused).
struct LabeledSamples {
  DenseMatrix X;
  std::vector<int> labels;
  std::vector<double> targets;

  Index size() const { return X.cols(); }
};

/// One-hot targets (N x classes) for labels in [0, classes).
DenseMatrix one_hot(const std::vector<int>& labels, Index classes);

// ---- synthetic concepts ----------------------------------------------------

inline constexpr std::array<double, 4> kSeaThresholds{8.0, 9.0, 7.0, 9.5};

/// SEA: three integer attributes 0..9 scaled by x/9*2-1; class 1 iff x1+x2 <= theta.
/// Each label is flipped independently with probability noise_fraction.
LabeledSamples gen_sea(Index n, int concept_index, double noise_fraction, RngStream& rng);

/// STAGGER: color, size, shape each uniform over 3 values, one-hot encoded into
/// 9 inputs of -1/+1 (attribute-major: color[3], size[3], shape[3]).
/// Value 0 of each attribute is red / small / circle, value 1 green / medium /
/// square, value 2 blue / large / triangle.
///   concept 1: red and small
///   concept 2: green or circle
///   concept 3: medium or large
LabeledSamples gen_stagger(Index n, int concept_index, RngStream& rng);

/// Truth of a STAGGER rule on raw attribute values (each in 0..2).
bool stagger_rule(int concept_index, int color, int size, int shape);

enum class RegressionFn { Sinc, Sinus, Gaussian };

std::string_view to_string(RegressionFn fn);
RegressionFn parse_regression_fn(std::string_view s);

/// Target in [0,1] of the regression concept at x.
///   sinc:     sin(4 pi x)/(4 pi x), affinely mapped from [min, 1]
///   sinus:    (sin(2 pi x) + 1) / 2
///   gaussian: exp(-8 x^2), affinely mapped from [exp(-8), 1]
double regression_target(RegressionFn fn, double x);

struct RegressionSamples {
  std::vector<double> x;
  std::vector<double> y;
};

/// x ~ U[-1,1), y = regression_target(fn, x).
RegressionSamples gen_regression(RegressionFn fn, Index n, RngStream& rng);

// ---- drift schedules -------------------------------------------------------

enum class DriftType { None, VD, RD, HD };
enum class DriftKind { Sudden, RecurringShuffled };

std::string_view to_string(DriftType t);
std::string_view to_string(DriftKind k);
DriftType parse_drift_type(std::string_view s);

/// Finite sample pool of one concept. Pools with the same `source` are
/// different feature views of one sample sequence and share a read cursor;
/// a negative source means the pool is its own source.
struct ConceptPool {
  std::string name;
  LabeledSamples samples;
  int source = -1;
};

/// Segment of a schedule. One entry in `pools` is a plain (sudden) segment;
/// several are interleaved per sample under a seeded permutation. `drift` is
/// the transition into this segment and is ignored on the first segment.
struct ScheduleSegment {
  std::vector<std::size_t> pools;
  std::vector<Index> counts;
  DriftType drift = DriftType::None;
};

struct DriftMarker {
  DriftType type = DriftType::None;
  DriftKind kind = DriftKind::Sudden;
  Index new_d = 0;              // input width from this batch on
  std::vector<std::size_t> new_pools;  // pools first seen at this segment, in order
  std::size_t segment = 0;
};

/// Batch of a composed stream. X is zero-padded at the tail to the widest
/// input seen so far.
struct StreamBatch {
  DenseMatrix X;
  std::vector<int> pool;
  std::vector<int> labels;
  std::vector<double> targets;  // filled for regression pools only
  std::optional<DriftMarker> marker;
  std::size_t segment = 0;
  std::size_t position = 0;  // index of the first sample in the whole stream

  Index size() const { return X.cols(); }
};

/// Splits the schedule into batches of at most batch_size samples; batches
/// never straddle a segment boundary. Samples are drawn from each pool in
/// order, continuing where the previous segment using that pool stopped.
/// The first batch of every segment after the first carries the marker.
/// Throws ConfigError when a segment widens the input without a VD or HD
/// transition, or asks for more samples than its pool has left.
std::vector<StreamBatch> compose_schedule(const std::vector<ConceptPool>& pools,
                                          const std::vector<ScheduleSegment>& schedule,
                                          Index batch_size, RngStream& rng);

// ---- image data ------------------------------------------------------------

struct IdxImages {
  Index rows = 0;
  Index cols = 0;
  DenseMatrix X;  // (rows*cols) x N, grey values scaled by v/255*2-1
};

struct IdxLabels {
  std::vector<int> labels;
};

using IdxData = std::variant<IdxImages, IdxLabels>;

/// Parses an IDX image (0x00000803) or label (0x00000801) file.
IdxData parse_idx(std::span<const unsigned char> bytes);
IdxData load_idx(const std::filesystem::path& path);
IdxImages load_idx_images(const std::filesystem::path& path);
IdxLabels load_idx_labels(const std::filesystem::path& path);

inline constexpr Index kHogFeatures = 81;

/// 81 gradient-orientation features of a 28x28 image in [-1,1].
///
/// Central-difference gradients (edges clamped) over the image; the top-left
/// 27x27 region is split into 3x3 cells of 9x9 pixels, each with 9 unsigned
/// orientation bins on [0, pi) weighted by magnitude. The 81-vector is L2
/// normalized (eps 1e-6), multiplied by 9 so a uniform spread has unit RMS,
/// and clipped to [-1, 1]. A constant image maps to zeros.
Vector hog_features(std::span<const double> image);

/// Applies hog_features to every column of a 784 x N matrix.
DenseMatrix hog_matrix(const DenseMatrix& images);

enum class NoiseKind { Gaussian, SaltPepper };

/// Gaussian: adds N(0, param^2) and clips to [-1,1]. Salt-pepper: sets each
/// pixel to -1 or +1 with probability param.
DenseMatrix augment_noise(const DenseMatrix& images, NoiseKind kind, double param,
                          RngStream& rng);

// ---- CSV -------------------------------------------------------------------

/// Header f0,...,f{d-1},label; one sample per row.
void write_csv(const std::filesystem::path& path, const LabeledSamples& data);
LabeledSamples read_csv(const std::filesystem::path& path);

/// Header f0,...,f{d-1},target with a real-valued target.
void write_regression_csv(const std::filesystem::path& path, const RegressionSamples& data);
RegressionSamples read_regression_csv(const std::filesystem::path& path);

}  // namespace aoselm

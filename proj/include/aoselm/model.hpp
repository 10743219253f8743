#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "aoselm/numerics.hpp"
#include "aoselm/rng.hpp"

namespace aoselm {

enum class InitScheme { Norm, Ros };
enum class Activation { Sigmoid, Tanh };

std::string_view to_string(InitScheme s);
std::string_view to_string(Activation a);
InitScheme parse_init_scheme(std::string_view s);
Activation parse_activation(std::string_view s);

/// Contiguous range of output columns owned by one concept.
struct ConceptBlock {
  int concept_id = 0;
  Index col_start = 0;
  Index width = 1;
  double gain = 1.0;  // regression amplification

  friend bool operator==(const ConceptBlock&, const ConceptBlock&) = default;
};

/// Inputs are column-per-sample (d x N), targets row-per-sample (N x m).
struct LabeledBatch {
  DenseMatrix X;
  DenseMatrix T;

  Index size() const { return X.cols(); }
};

/// Complete learner state of a single-hidden-layer random-feature network.
///
/// Hidden layer: H = g(X' A + 1 b'). Output: H beta. K is the accumulated
/// autocorrelation H'H plus the ridge prime I/c; it is the only memory of past
/// data the model keeps.
struct ElmModel {
  DenseMatrix A;     // d x L input weights
  Vector b;          // L biases
  DenseMatrix K;     // L x L autocorrelation
  DenseMatrix beta;  // L x m output weights
  double c = 1.0;
  Activation activation = Activation::Sigmoid;
  InitScheme scheme = InitScheme::Ros;
  std::vector<ConceptBlock> concepts;
  std::uint64_t seed = 0;  // seed of the stream that drew the initial weights

  Index d() const { return A.rows(); }
  Index L() const { return A.cols(); }
  Index m() const { return beta.cols(); }

  const ConceptBlock& block(int concept_id) const;
  ConceptBlock& block(int concept_id);
  bool has_concept(int concept_id) const;

  /// Throws DimensionError describing the first broken structural invariant.
  void check_invariants() const;
};

/// NORM: A ~ N(0,1), b ~ U[-1,1]. ROS: A, b ~ U[-1,1]. Both: K = I/c, beta = 0,
/// one concept block (id 0) spanning all m outputs.
ElmModel init_model(Index d, Index L, Index m, InitScheme scheme, double c, RngStream& rng,
                    Activation activation = Activation::Sigmoid);

/// Applies the activation entrywise in place.
void apply_activation(Activation a, DenseMatrix& z);

/// Hidden-layer output of arbitrary weights, g(X' A + 1 b').
DenseMatrix hidden_layer(const DenseMatrix& A, const Vector& b, Activation activation,
                         const DenseMatrix& X);

/// N x L hidden-layer output for inputs X (d x N).
DenseMatrix hidden_activations(const ElmModel& model, const DenseMatrix& X);

/// N x m output scores, hidden_activations(X) * beta.
DenseMatrix predict_scores(const ElmModel& model, const DenseMatrix& X);

/// Row-wise argmax over a column range; ties resolve to the lowest index.
std::vector<Index> argmax_rows(const DenseMatrix& scores, Index col_start, Index width);

/// Class labels per sample. With a concept id, the argmax is restricted to that
/// concept's block and the label is the index within the block. With nullopt
/// the argmax runs over all m outputs.
std::vector<Index> classify(const ElmModel& model, const DenseMatrix& X,
                            std::optional<int> active_concept);
std::vector<Index> classify_scores(const ElmModel& model, const DenseMatrix& scores,
                                   std::optional<int> active_concept);

/// gain * score of a width-1 concept block.
std::vector<double> predict_regression(const ElmModel& model, const DenseMatrix& X,
                                       int concept_id);

/// Throws ArgumentError if any entry of X lies outside [-1, 1]. Used by
/// verification paths only; training and prediction do not check the range.
void check_input_range(const DenseMatrix& X);

}  // namespace aoselm

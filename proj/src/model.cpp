#include "aoselm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aoselm/errors.hpp"

namespace aoselm {

std::string_view to_string(InitScheme s) {
  return s == InitScheme::Norm ? "NORM" : "ROS";
}

std::string_view to_string(Activation a) {
  return a == Activation::Sigmoid ? "sigmoid" : "tanh";
}

InitScheme parse_init_scheme(std::string_view s) {
  if (s == "NORM" || s == "norm") return InitScheme::Norm;
  if (s == "ROS" || s == "ros") return InitScheme::Ros;
  throw ArgumentError("unknown init scheme '" + std::string(s) + "' (expected NORM or ROS)");
}

Activation parse_activation(std::string_view s) {
  if (s == "sigmoid" || s == "sig") return Activation::Sigmoid;
  if (s == "tanh") return Activation::Tanh;
  throw ArgumentError("unknown activation '" + std::string(s) + "' (expected sigmoid or tanh)");
}

const ConceptBlock& ElmModel::block(int concept_id) const {
  for (const auto& blk : concepts) {
    if (blk.concept_id == concept_id) return blk;
  }
  throw UnknownConceptError("unknown concept id " + std::to_string(concept_id));
}

ConceptBlock& ElmModel::block(int concept_id) {
  return const_cast<ConceptBlock&>(std::as_const(*this).block(concept_id));
}

bool ElmModel::has_concept(int concept_id) const {
  return std::any_of(concepts.begin(), concepts.end(),
                     [&](const ConceptBlock& blk) { return blk.concept_id == concept_id; });
}

void ElmModel::check_invariants() const {
  if (b.size() != L()) throw DimensionError("model: bias length differs from L");
  if (K.rows() != L() || K.cols() != L()) throw DimensionError("model: K is not L x L");
  if (beta.rows() != L()) throw DimensionError("model: beta row count differs from L");
  if (!(c > 0.0)) throw DimensionError("model: ridge scalar must be positive");
  Index next = 0;
  for (const auto& blk : concepts) {
    if (blk.col_start != next || blk.width < 1 || !(blk.gain > 0.0)) {
      throw DimensionError("model: concept blocks do not tile the output columns");
    }
    next += blk.width;
  }
  if (next != m()) throw DimensionError("model: concept widths do not sum to m");
}

ElmModel init_model(Index d, Index L, Index m, InitScheme scheme, double c, RngStream& rng,
                    Activation activation) {
  if (d < 1 || L < 1 || m < 1) {
    throw ArgumentError("init_model: d, L and m must all be at least 1");
  }
  if (!(c > 0.0)) {
    throw ArgumentError("init_model: ridge scalar c must be positive");
  }
  ElmModel model;
  model.seed = rng.seed();
  model.scheme = scheme;
  model.activation = activation;
  model.c = c;
  model.A = random_matrix(rng, d, L,
                          scheme == InitScheme::Norm ? RandomScheme::Normal : RandomScheme::Uniform);
  model.b = random_matrix(rng, L, 1, RandomScheme::Uniform).col(0);
  model.K = DenseMatrix::Identity(L, L) / c;
  model.beta = DenseMatrix::Zero(L, m);
  model.concepts.push_back(ConceptBlock{0, 0, m, 1.0});
  return model;
}

void apply_activation(Activation a, DenseMatrix& z) {
  if (a == Activation::Sigmoid) {
    z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
  } else {
    z = z.array().tanh().matrix();
  }
}

DenseMatrix hidden_layer(const DenseMatrix& A, const Vector& b, Activation activation,
                         const DenseMatrix& X) {
  if (X.rows() != A.rows() || b.size() != A.cols()) {
    throw DimensionError("hidden_layer: inputs, weights and biases do not fit together");
  }
  // Inner products run over fixed 64-attribute chunks, the last one zero
  // padded. Appending attributes then only adds exact zeros for samples that
  // are zero on them, so their activations stay bit-identical.
  constexpr Index chunk = 64;
  const Index d = A.rows();
  DenseMatrix h = DenseMatrix::Zero(X.cols(), A.cols());
  for (Index start = 0; start < d; start += chunk) {
    const Index len = std::min(chunk, d - start);
    if (len == chunk) {
      h.noalias() += X.middleRows(start, chunk).transpose() * A.middleRows(start, chunk);
    } else {
      DenseMatrix xs = DenseMatrix::Zero(chunk, X.cols());
      DenseMatrix as = DenseMatrix::Zero(chunk, A.cols());
      xs.topRows(len) = X.middleRows(start, len);
      as.topRows(len) = A.middleRows(start, len);
      h.noalias() += xs.transpose() * as;
    }
  }
  h.rowwise() += b.transpose();
  apply_activation(activation, h);
  return h;
}

DenseMatrix hidden_activations(const ElmModel& model, const DenseMatrix& X) {
  if (X.rows() != model.d()) {
    throw DimensionError("hidden_activations: input has " + std::to_string(X.rows()) +
                         " attributes, model expects " + std::to_string(model.d()));
  }
  return hidden_layer(model.A, model.b, model.activation, X);
}

DenseMatrix predict_scores(const ElmModel& model, const DenseMatrix& X) {
  const DenseMatrix h = hidden_activations(model, X);
  // One product per block: a block's scores then do not depend on how many
  // other outputs the model has, bit for bit.
  DenseMatrix scores(h.rows(), model.m());
  Index done = 0;
  for (const auto& blk : model.concepts) {
    scores.middleCols(blk.col_start, blk.width).noalias() =
        h * model.beta.middleCols(blk.col_start, blk.width);
    done += blk.width;
  }
  if (done != model.m()) scores.noalias() = h * model.beta;
  return scores;
}

std::vector<Index> argmax_rows(const DenseMatrix& scores, Index col_start, Index width) {
  std::vector<Index> out(static_cast<std::size_t>(scores.rows()));
  for (Index r = 0; r < scores.rows(); ++r) {
    Index best = 0;
    double best_val = scores(r, col_start);
    for (Index j = 1; j < width; ++j) {
      if (scores(r, col_start + j) > best_val) {
        best_val = scores(r, col_start + j);
        best = j;
      }
    }
    out[static_cast<std::size_t>(r)] = best;
  }
  return out;
}

std::vector<Index> classify_scores(const ElmModel& model, const DenseMatrix& scores,
                                   std::optional<int> active_concept) {
  if (scores.cols() != model.m()) {
    throw DimensionError("classify: score matrix width differs from m");
  }
  if (!active_concept) {
    return argmax_rows(scores, 0, model.m());
  }
  const auto& blk = model.block(*active_concept);
  return argmax_rows(scores, blk.col_start, blk.width);
}

std::vector<Index> classify(const ElmModel& model, const DenseMatrix& X,
                            std::optional<int> active_concept) {
  if (active_concept) {
    (void)model.block(*active_concept);  // unknown ids fail before any work
  }
  return classify_scores(model, predict_scores(model, X), active_concept);
}

std::vector<double> predict_regression(const ElmModel& model, const DenseMatrix& X,
                                       int concept_id) {
  const auto& blk = model.block(concept_id);
  if (blk.width != 1) {
    throw DimensionError("predict_regression: concept " + std::to_string(concept_id) +
                         " has " + std::to_string(blk.width) + " outputs, expected 1");
  }
  const Vector scores = hidden_activations(model, X) * model.beta.col(blk.col_start);
  std::vector<double> out(static_cast<std::size_t>(scores.size()));
  for (Index i = 0; i < scores.size(); ++i) {
    out[static_cast<std::size_t>(i)] = blk.gain * scores(i);
  }
  return out;
}

void check_input_range(const DenseMatrix& X) {
  if (X.size() > 0 && (X.minCoeff() < -1.0 || X.maxCoeff() > 1.0)) {
    throw ArgumentError("inputs must lie in [-1, 1]");
  }
}

}  // namespace aoselm

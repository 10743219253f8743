#include "aoselm/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "aoselm/errors.hpp"

namespace aoselm {

void adapt_virtual(ElmModel& model, Index new_d, RngStream& rng) {
  const Index d = model.d();
  if (new_d <= d) {
    throw ArgumentError("adapt_virtual: new attribute count " + std::to_string(new_d) +
                        " must exceed " + std::to_string(d));
  }
  const auto scheme =
      model.scheme == InitScheme::Norm ? RandomScheme::Normal : RandomScheme::Uniform;
  DenseMatrix a(new_d, model.L());
  a.topRows(d) = model.A;
  a.bottomRows(new_d - d) = random_matrix(rng, new_d - d, model.L(), scheme);
  model.A = std::move(a);
}

int adapt_real(ElmModel& model, Index added_m, bool as_new_concept) {
  if (added_m < 1) {
    throw ArgumentError("adapt_real: added_m must be at least 1");
  }
  const Index m = model.m();
  DenseMatrix beta = DenseMatrix::Zero(model.L(), m + added_m);
  beta.leftCols(m) = model.beta;

  auto concepts = model.concepts;
  int id = 0;
  if (as_new_concept || concepts.empty()) {
    for (const auto& blk : concepts) id = std::max(id, blk.concept_id + 1);
    concepts.push_back(ConceptBlock{id, m, added_m, 1.0});
  } else {
    concepts.back().width += added_m;
    id = concepts.back().concept_id;
  }
  model.beta = std::move(beta);
  model.concepts = std::move(concepts);
  return id;
}

int adapt_hybrid(ElmModel& model, Index new_d, Index added_m, bool as_new_concept,
                 RngStream& rng) {
  ElmModel work = model;
  adapt_virtual(work, new_d, rng);
  const int id = adapt_real(work, added_m, as_new_concept);
  model = std::move(work);
  return id;
}

void set_concept_gain(ElmModel& model, int concept_id, double gain) {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw ArgumentError("set_concept_gain: gain must be positive and finite");
  }
  model.block(concept_id).gain = gain;
}

std::vector<double> default_gain_grid() {
  std::vector<double> grid;
  for (int i = 5; i <= 400; ++i) grid.push_back(0.05 * i);
  return grid;
}

double fit_concept_gain(const ElmModel& model, int concept_id, const DenseMatrix& X,
                        const std::vector<double>& y, const std::vector<double>& grid) {
  if (grid.empty()) {
    throw ArgumentError("fit_concept_gain: empty grid");
  }
  if (static_cast<Index>(y.size()) != X.cols() || y.empty()) {
    throw DimensionError("fit_concept_gain: target count differs from sample count");
  }
  ElmModel unit = model;
  unit.block(concept_id).gain = 1.0;
  const auto raw = predict_regression(unit, X, concept_id);
  double best_gain = grid.front();
  double best_sse = std::numeric_limits<double>::infinity();
  for (double g : grid) {
    if (!(g > 0.0)) throw ArgumentError("fit_concept_gain: grid values must be positive");
    double sse = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const double e = g * raw[i] - y[i];
      sse += e * e;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_gain = g;
    }
  }
  return best_gain;
}

std::size_t p_hat_rank(const DenseMatrix& k) {
  if (auto p = symmetric_inverse(k)) {
    return numeric_rank(*p);
  }
  return numeric_rank(k);
}

UnderfitVerdict underfit_check(const ElmModel& model, std::size_t rank_before, Index delta_L) {
  UnderfitVerdict v;
  v.rank_before = rank_before;
  v.rank_after = p_hat_rank(model.K);
  v.flagged = delta_L > 0 && v.rank_after <= v.rank_before;
  return v;
}

}  // namespace aoselm

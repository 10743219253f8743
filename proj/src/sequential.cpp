#include "aoselm/sequential.hpp"

#include <string>
#include <utility>

#include "aoselm/drift.hpp"
#include "aoselm/errors.hpp"

namespace aoselm {

namespace {

void check_batch(const ElmModel& model, const LabeledBatch& batch, const char* who) {
  if (batch.size() == 0) {
    throw ArgumentError(std::string(who) + ": batch is empty");
  }
  if (batch.X.rows() != model.d()) {
    throw DimensionError(std::string(who) + ": batch has " + std::to_string(batch.X.rows()) +
                         " attributes, model expects " + std::to_string(model.d()));
  }
  if (batch.T.rows() != batch.X.cols()) {
    throw DimensionError(std::string(who) + ": X has " + std::to_string(batch.X.cols()) +
                         " samples but T has " + std::to_string(batch.T.rows()) + " rows");
  }
  if (batch.T.cols() != model.m()) {
    throw DimensionError(std::string(who) + ": targets have " + std::to_string(batch.T.cols()) +
                         " columns, model has " + std::to_string(model.m()) + " outputs");
  }
}

}  // namespace

void oselm_update(ElmModel& model, const LabeledBatch& batch) {
  check_batch(model, batch, "oselm_update");
  const DenseMatrix h = hidden_activations(model, batch.X);
  DenseMatrix k = model.K;
  k.noalias() += h.transpose() * h;
  symmetrize(k);
  const DenseMatrix residual = batch.T - h * model.beta;
  DenseMatrix beta = model.beta + spd_solve(k, h.transpose() * residual);
  model.K = std::move(k);
  model.beta = std::move(beta);
}

void ceoselm_update(ElmModel& model, const LabeledBatch& batch, const GrowthSpec& growth) {
  if (growth.delta_L < 0) {
    throw ArgumentError("ceoselm_update: delta_L must be non-negative");
  }
  if (growth.delta_L == 0) {
    oselm_update(model, batch);
    return;
  }
  if (growth.rng == nullptr) {
    throw ArgumentError("ceoselm_update: growth requires a random stream");
  }
  check_batch(model, batch, "ceoselm_update");

  const Index L = model.L();
  const Index dl = growth.delta_L;
  const Index grown = L + dl;

  DenseMatrix dA = random_matrix(*growth.rng, model.d(), dl, RandomScheme::Uniform);
  Vector db = random_matrix(*growth.rng, dl, 1, RandomScheme::Uniform).col(0);

  DenseMatrix h_hat(batch.size(), grown);
  h_hat.leftCols(L) = hidden_activations(model, batch.X);
  h_hat.rightCols(dl) = hidden_layer(dA, db, model.activation, batch.X);

  DenseMatrix k_hat = DenseMatrix::Zero(grown, grown);
  k_hat.topLeftCorner(L, L) = model.K;
  k_hat.bottomRightCorner(dl, dl).diagonal().array() += 1.0 / model.c;
  k_hat.noalias() += h_hat.transpose() * h_hat;
  symmetrize(k_hat);

  DenseMatrix beta_hat = DenseMatrix::Zero(grown, model.m());
  beta_hat.topRows(L) = model.beta;
  const DenseMatrix residual = batch.T - h_hat * beta_hat;

  Eigen::LLT<DenseMatrix> llt(k_hat);
  if (llt.info() != Eigen::Success) {
    throw SolverError("ceoselm_update: grown autocorrelation matrix is not positive definite",
                      RankDiagnostics{p_hat_rank(model.K), p_hat_rank(k_hat)});
  }
  beta_hat += llt.solve(h_hat.transpose() * residual);

  DenseMatrix a_hat(model.d(), grown);
  a_hat.leftCols(L) = model.A;
  a_hat.rightCols(dl) = dA;
  Vector b_hat(grown);
  b_hat.head(L) = model.b;
  b_hat.tail(dl) = db;

  model.A = std::move(a_hat);
  model.b = std::move(b_hat);
  model.K = std::move(k_hat);
  model.beta = std::move(beta_hat);
}

}  // namespace aoselm

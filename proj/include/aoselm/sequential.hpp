#pragma once

#include "aoselm/model.hpp"

namespace aoselm {

/// Hidden-node growth fused with a training batch. delta_L = 0 is a plain
/// OS-ELM step; otherwise `rng` must point at the stream that draws the new
/// input weights and biases.
struct GrowthSpec {
  Index delta_L = 0;
  RngStream* rng = nullptr;
};

/// Recursive least-squares step: K += H'H, beta += K^-1 H'(T - H beta).
///
/// Strong exception guarantee: on any error the model is left unmodified.
void oselm_update(ElmModel& model, const LabeledBatch& batch);

/// Grows the hidden layer by growth.delta_L nodes and trains on `batch` in one
/// step. New weights are drawn U[-1,1]; past data are treated as having zero
/// activation on the new nodes, so K becomes
///   [[K + H'H, H'dH], [dH'H, dH'dH + I/c]]
/// and beta gains delta_L zero rows before the recursive refresh.
///
/// Strong exception guarantee. A factorization failure throws SolverError
/// carrying rank(P) before and after the growth.
void ceoselm_update(ElmModel& model, const LabeledBatch& batch, const GrowthSpec& growth);

}  // namespace aoselm

#pragma once

#include <cstddef>
#include <vector>

#include "aoselm/model.hpp"

namespace aoselm {

/// Appends new_d - d input attributes. The new rows of A are drawn from the
/// model's init scheme; old samples zero-padded at the tail keep their exact
/// hidden activations.
void adapt_virtual(ElmModel& model, Index new_d, RngStream& rng);

/// Appends added_m zero output columns. With as_new_concept a new block is
/// registered and its id returned; otherwise the last block widens and its id
/// is returned.
int adapt_real(ElmModel& model, Index added_m, bool as_new_concept);

/// adapt_virtual followed by adapt_real, all or nothing.
int adapt_hybrid(ElmModel& model, Index new_d, Index added_m, bool as_new_concept,
                 RngStream& rng);

void set_concept_gain(ElmModel& model, int concept_id, double gain);

/// Gain g minimizing RMSE(g * score, y) over `grid` on a calibration set.
double fit_concept_gain(const ElmModel& model, int concept_id, const DenseMatrix& X,
                        const std::vector<double>& y, const std::vector<double>& grid);

/// 0.25, 0.30, ..., 20.0.
std::vector<double> default_gain_grid();

/// rank(K^-1) with the inverse formed explicitly; rank(K) when K cannot be
/// inverted.
std::size_t p_hat_rank(const DenseMatrix& k);

struct UnderfitVerdict {
  std::size_t rank_before = 0;
  std::size_t rank_after = 0;
  bool flagged = false;
};

/// Compares rank(P) of the grown model against the snapshot taken before the
/// growth. Flags a non-positive increment; delta_L = 0 never flags.
UnderfitVerdict underfit_check(const ElmModel& model, std::size_t rank_before,
                               Index delta_L);

}  // namespace aoselm

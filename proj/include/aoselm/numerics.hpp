#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace aoselm {

/// Row-major dense real matrix. Carries X, H, T, K, P, beta and A.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Ridge scalar meaning "no regularization".
inline constexpr double kNoRidge = std::numeric_limits<double>::infinity();

/// Builds a rows x cols matrix from row-major data, rejecting non-finite entries.
DenseMatrix make_matrix(Index rows, Index cols, std::span<const double> data);

/// Throws ArgumentError naming `what` if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const DenseMatrix>& m, std::string_view what);

/// beta minimizing |H beta - T|^2 + (1/c)|beta|^2, i.e. (H'H + I/c)^-1 H'T.
/// With c = kNoRidge the I/c term is dropped and a rank-deficient H'H is an error.
DenseMatrix ridge_solve(const DenseMatrix& hidden, const DenseMatrix& targets, double c);

/// Solves K S = B for symmetric positive definite K by Cholesky factorization.
/// Throws SolverError when K is not numerically positive definite.
DenseMatrix spd_solve(const DenseMatrix& k, const DenseMatrix& b);

/// Explicit inverse of a symmetric matrix. Uses a pivoted LDL' factorization so
/// that badly conditioned (but invertible) matrices still produce an inverse.
/// Returns nullopt when the factorization reports a zero pivot.
std::optional<DenseMatrix> symmetric_inverse(const DenseMatrix& k);

/// Default rank tolerance: max(rows, cols) * eps * largest singular value.
double default_rank_tolerance(const DenseMatrix& m);

/// Number of singular values strictly greater than `tol` (default tolerance if absent).
std::size_t numeric_rank(const DenseMatrix& m, std::optional<double> tol = std::nullopt);

/// Averages K with its transpose in place.
void symmetrize(DenseMatrix& k);

}  // namespace aoselm

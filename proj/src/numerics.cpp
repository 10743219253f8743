#include "aoselm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aoselm/errors.hpp"

namespace aoselm {

DenseMatrix make_matrix(Index rows, Index cols, std::span<const double> data) {
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw DimensionError("make_matrix: data length " + std::to_string(data.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  DenseMatrix m = Eigen::Map<const DenseMatrix>(data.data(), rows, cols);
  require_finite(m, "make_matrix");
  return m;
}

void require_finite(const Eigen::Ref<const DenseMatrix>& m, std::string_view what) {
  if (!m.allFinite()) {
    throw ArgumentError(std::string(what) + ": matrix contains non-finite entries");
  }
}

DenseMatrix spd_solve(const DenseMatrix& k, const DenseMatrix& b) {
  if (k.rows() != k.cols() || k.rows() != b.rows()) {
    throw DimensionError("spd_solve: K is " + std::to_string(k.rows()) + "x" +
                         std::to_string(k.cols()) + ", B has " + std::to_string(b.rows()) +
                         " rows");
  }
  Eigen::LLT<DenseMatrix> llt(k);
  if (llt.info() != Eigen::Success) {
    throw SolverError("spd_solve: matrix is not positive definite; ridge regularization is required");
  }
  return llt.solve(b);
}

DenseMatrix ridge_solve(const DenseMatrix& hidden, const DenseMatrix& targets, double c) {
  if (hidden.rows() != targets.rows()) {
    throw DimensionError("ridge_solve: H has " + std::to_string(hidden.rows()) +
                         " rows, T has " + std::to_string(targets.rows()));
  }
  if (!(c > 0.0)) {
    throw ArgumentError("ridge_solve: ridge scalar c must be positive");
  }
  DenseMatrix normal = hidden.transpose() * hidden;
  if (std::isinf(c)) {
    if (numeric_rank(normal) < static_cast<std::size_t>(normal.rows())) {
      throw SolverError("ridge_solve: H'H is rank deficient and no ridge term was given");
    }
  } else {
    normal.diagonal().array() += 1.0 / c;
  }
  return spd_solve(normal, hidden.transpose() * targets);
}

std::optional<DenseMatrix> symmetric_inverse(const DenseMatrix& k) {
  if (k.rows() != k.cols()) {
    throw DimensionError("symmetric_inverse: matrix is not square");
  }
  Eigen::LDLT<DenseMatrix> ldlt(k);
  if (ldlt.info() != Eigen::Success) {
    return std::nullopt;
  }
  const auto d = ldlt.vectorD();
  if ((d.array() == 0.0).any()) {
    return std::nullopt;
  }
  DenseMatrix inv = ldlt.solve(DenseMatrix::Identity(k.rows(), k.cols()));
  if (!inv.allFinite()) {
    return std::nullopt;
  }
  symmetrize(inv);
  return inv;
}

namespace {

Vector singular_values(const DenseMatrix& m) {
  if (m.size() == 0) {
    return Vector();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues();
}

double tolerance_for(const DenseMatrix& m, const Vector& sv) {
  const double largest = sv.size() > 0 ? sv.maxCoeff() : 0.0;
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * largest;
}

}  // namespace

double default_rank_tolerance(const DenseMatrix& m) {
  return tolerance_for(m, singular_values(m));
}

std::size_t numeric_rank(const DenseMatrix& m, std::optional<double> tol) {
  const Vector sv = singular_values(m);
  const double threshold = tol.value_or(tolerance_for(m, sv));
  return static_cast<std::size_t>((sv.array() > threshold).count());
}

void symmetrize(DenseMatrix& k) {
  k = (0.5 * (k + k.transpose())).eval();
}

}  // namespace aoselm

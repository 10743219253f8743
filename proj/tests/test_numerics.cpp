#include <doctest.h>

#include <random>

#include "aoselm/errors.hpp"
#include "aoselm/numerics.hpp"
#include "aoselm/rng.hpp"
#include "oracles.hpp"

using namespace aoselm;

TEST_CASE("ridge_solve identity") {
  const DenseMatrix I = DenseMatrix::Identity(2, 2);
  CHECK((ridge_solve(I, I, kNoRidge) - I).norm() < 1e-14);
}

TEST_CASE("ridge_solve least-squares mean") {
  const DenseMatrix H = make_matrix(2, 1, std::vector<double>{1, 1});
  const DenseMatrix T = make_matrix(2, 1, std::vector<double>{2, 4});
  CHECK(ridge_solve(H, T, kNoRidge)(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
  // (H'H + 1/c)^-1 H'T = 6 / 3
  CHECK(ridge_solve(H, T, 1.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("ridge_solve agrees with augmented QR") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = oracle::pick(gen, 20, 80);
    const Index L = oracle::pick(gen, 2, 15);
    const DenseMatrix H = oracle::uniform(gen, n, L);
    const DenseMatrix T = oracle::uniform(gen, n, 3);
    const double c = trial % 2 ? 10.0 : kNoRidge;
    CHECK(oracle::rel_err(ridge_solve(H, T, c), oracle::ridge_qr(H, T, c)) < 1e-10);
  }
}

TEST_CASE("ridge_solve rejects rank deficiency without ridge") {
  const DenseMatrix H = make_matrix(2, 2, std::vector<double>{1, 1, 1, 1});
  const DenseMatrix T = DenseMatrix::Ones(2, 1);
  CHECK_THROWS_AS(ridge_solve(H, T, kNoRidge), SolverError);
  CHECK_NOTHROW(ridge_solve(H, T, 1.0));
}

TEST_CASE("ridge_solve argument checks") {
  const DenseMatrix H = DenseMatrix::Ones(3, 2);
  CHECK_THROWS_AS(ridge_solve(H, DenseMatrix::Ones(2, 1), 1.0), DimensionError);
  CHECK_THROWS_AS(ridge_solve(H, DenseMatrix::Ones(3, 1), 0.0), ArgumentError);
  CHECK_THROWS_AS(ridge_solve(H, DenseMatrix::Ones(3, 1), -1.0), ArgumentError);
}

TEST_CASE("spd_solve") {
  SUBCASE("identity") {
    std::mt19937_64 gen(1);
    const DenseMatrix M = oracle::uniform(gen, 3, 2);
    CHECK((spd_solve(DenseMatrix::Identity(3, 3), M) - M).norm() < 1e-15);
  }
  SUBCASE("diagonal") {
    const DenseMatrix K = make_matrix(2, 2, std::vector<double>{4, 0, 0, 9});
    const DenseMatrix B = make_matrix(2, 1, std::vector<double>{8, 27});
    const DenseMatrix S = spd_solve(K, B);
    CHECK(S(0, 0) == doctest::Approx(2.0));
    CHECK(S(1, 0) == doctest::Approx(3.0));
  }
  SUBCASE("random residual") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 5; ++trial) {
      const DenseMatrix R = oracle::uniform(gen, 10, 10);
      const DenseMatrix K = R.transpose() * R + 0.1 * DenseMatrix::Identity(10, 10);
      const DenseMatrix B = oracle::uniform(gen, 10, 3);
      const DenseMatrix S = spd_solve(K, B);
      CHECK((K * S - B).norm() / B.norm() <= 1e-10);
    }
  }
  SUBCASE("indefinite") {
    const DenseMatrix K = make_matrix(2, 2, std::vector<double>{1, 0, 0, -1});
    CHECK_THROWS_AS(spd_solve(K, DenseMatrix::Ones(2, 1)), SolverError);
  }
}

TEST_CASE("numeric_rank") {
  CHECK(numeric_rank(DenseMatrix::Identity(3, 3)) == 3);
  CHECK(numeric_rank(DenseMatrix::Zero(3, 3)) == 0);
  CHECK(numeric_rank(make_matrix(2, 2, std::vector<double>{1, 1, 1, 1})) == 1);
  CHECK(numeric_rank(DenseMatrix::Identity(3, 3), 2.0) == 0);
}

TEST_CASE("symmetric_inverse") {
  std::mt19937_64 gen(5);
  const DenseMatrix R = oracle::uniform(gen, 6, 6);
  const DenseMatrix K = R.transpose() * R + DenseMatrix::Identity(6, 6);
  const auto inv = symmetric_inverse(K);
  REQUIRE(inv.has_value());
  CHECK((K * *inv - DenseMatrix::Identity(6, 6)).norm() < 1e-10);
  CHECK_FALSE(symmetric_inverse(DenseMatrix::Zero(2, 2)).has_value());
}

TEST_CASE("make_matrix and finiteness") {
  CHECK_THROWS_AS(make_matrix(1, 2, std::vector<double>{1.0, std::nan("")}), ArgumentError);
  CHECK_THROWS_AS(make_matrix(2, 2, std::vector<double>{1.0}), DimensionError);
  DenseMatrix k = make_matrix(2, 2, std::vector<double>{1, 2, 4, 1});
  symmetrize(k);
  CHECK(k(0, 1) == 3.0);
  CHECK(k(1, 0) == 3.0);
}

TEST_CASE("RngStream determinism") {
  RngStream a(42);
  RngStream b(42);
  CHECK(random_matrix(a, 5, 7, RandomScheme::Uniform) == random_matrix(b, 5, 7, RandomScheme::Uniform));
  RngStream c(42);
  RngStream d(42);
  CHECK(random_matrix(c, 4, 4, RandomScheme::Normal) == random_matrix(d, 4, 4, RandomScheme::Normal));
  RngStream e(43);
  RngStream f(42);
  CHECK(random_matrix(e, 4, 4, RandomScheme::Uniform) != random_matrix(f, 4, 4, RandomScheme::Uniform));
}

TEST_CASE("uniform support") {
  RngStream rng(9);
  const DenseMatrix m = random_matrix(rng, 1000, 1000, RandomScheme::Uniform);
  CHECK(m.minCoeff() >= -1.0);
  CHECK(m.maxCoeff() <= 1.0);
  // mean of U[-1,1) over 1e6 draws
  CHECK(std::abs(m.mean()) < 0.005);
}

TEST_CASE("normal moments") {
  RngStream rng(11);
  const DenseMatrix m = random_matrix(rng, 1000, 1000, RandomScheme::Normal);
  double sum = 0.0;
  double sq = 0.0;
  for (Index i = 0; i < m.size(); ++i) {
    sum += m.data()[i];
    sq += m.data()[i] * m.data()[i];
  }
  const double n = static_cast<double>(m.size());
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(var - 1.0) <= 0.02);
}

TEST_CASE("below and permutation") {
  RngStream rng(2);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[rng.below(7)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);

  const auto p = random_permutation(rng, 100);
  std::vector<std::size_t> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 100; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("fork is deterministic and distinct") {
  RngStream a(5);
  RngStream b(5);
  RngStream fa = a.fork(1);
  RngStream fb = b.fork(1);
  CHECK(fa.next_u64() == fb.next_u64());
  RngStream c(5);
  RngStream fc = c.fork(2);
  RngStream d(5);
  RngStream fd = d.fork(1);
  CHECK(fc.next_u64() != fd.next_u64());
}

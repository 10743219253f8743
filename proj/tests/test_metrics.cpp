#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "aoselm/errors.hpp"
#include "aoselm/metrics.hpp"

using namespace aoselm;

TEST_CASE("accuracy") {
  CHECK(accuracy(ConfusionMatrix{{5, 0}, {0, 7}}) == 1.0);
  CHECK(accuracy(ConfusionMatrix{{0, 3}, {4, 0}}) == 0.0);
  // 70 of 100 on the diagonal
  CHECK(accuracy(ConfusionMatrix{{40, 10}, {20, 30}}) == doctest::Approx(0.70));
  CHECK_THROWS_AS(accuracy(ConfusionMatrix(3)), ArgumentError);
}

TEST_CASE("confusion counting") {
  ConfusionMatrix cm(3);
  cm.add(0, 0);
  cm.add(1, 2, 4);
  cm.add(2, 2);
  CHECK(cm.total() == 6);
  CHECK(cm.trace() == 2);
  CHECK(cm.count(1, 2) == 4);
  CHECK_THROWS(cm.add(3, 0));
}

TEST_CASE("cohen kappa") {
  CHECK(cohen_kappa(ConfusionMatrix{{10, 0, 0}, {0, 5, 0}, {0, 0, 3}}).kappa ==
        doctest::Approx(1.0));
  CHECK(cohen_kappa(ConfusionMatrix{{25, 25}, {25, 25}}).kappa == doctest::Approx(0.0));

  // po = 0.7, pe = 0.5*0.6 + 0.5*0.4 = 0.5
  const KappaResult k = cohen_kappa(ConfusionMatrix{{40, 10}, {20, 30}});
  CHECK(k.kappa == doctest::Approx(0.40));
  CHECK(k.kappa_error == doctest::Approx(std::sqrt(0.7 * 0.3 / (100 * 0.25))));

  CHECK_THROWS_AS(cohen_kappa(ConfusionMatrix{{5, 0}, {0, 0}}), ArgumentError);
}

TEST_CASE("prequential trace") {
  PrequentialTrace perfect(10);
  for (int i = 0; i < 95; ++i) perfect.add(true);
  perfect.finish();
  REQUIRE(perfect.points().size() == 10);
  for (const auto& p : perfect.points()) CHECK(p.accuracy == 1.0);
  CHECK(perfect.points().back().position == 95);

  std::mt19937_64 gen(12);
  std::bernoulli_distribution coin(0.5);
  PrequentialTrace guess(1000);
  for (int i = 0; i < 20000; ++i) guess.add(coin(gen));
  guess.finish();
  for (const auto& p : guess.points()) {
    // 4 binomial standard deviations at n = 1000
    CHECK(std::abs(p.accuracy - 0.5) < 4 * std::sqrt(0.25 / 1000));
  }
}

TEST_CASE("trace csv") {
  const auto path = std::filesystem::temp_directory_path() / "aoselm_trace_test.csv";
  write_trace_csv(path, {{10, 0.5}, {20, 0.75}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "position,accuracy");
  std::getline(in, line);
  CHECK(line.rfind("10,0.5", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("forgetting capability") {
  CHECK(forgetting_capability(0.9, {0.9, 0.9}) == std::vector<double>{0.0, 0.0});
  CHECK(forgetting_capability(0.97, {0.18})[0] == doctest::Approx(0.79));
  CHECK(forgetting_capability(0.94, {0.96})[0] == doctest::Approx(-0.02));
}

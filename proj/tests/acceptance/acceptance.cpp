// Acceptance runner: one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aoselm/drift.hpp"
#include "aoselm/errors.hpp"
#include "aoselm/experiment.hpp"
#include "aoselm/monitor.hpp"
#include "aoselm/numerics.hpp"
#include "aoselm/sequential.hpp"
#include "aoselm/serialize.hpp"
#include "../oracles.hpp"

using namespace aoselm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig with_data(ExperimentConfig c) {
  c.data_dir = AOSELM_DATA_DIR;
  return c;
}

ExperimentConfig preset(const std::string& bench, const std::string& variant) {
  for (auto& c : bench_preset(bench)) {
    if (c.name == bench + "-" + variant) return with_data(c);
  }
  throw ConfigError("no preset variant " + bench + "-" + variant);
}

// ---- 1: sequential training equals the offline ridge solution ---------------

Outcome c1_offline_equivalence() {
  std::mt19937_64 gen(1001);
  double worst_ridge = 0.0;
  double worst_qr = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = oracle::pick(gen, 60, 500);
    const Index L = oracle::pick(gen, 5, 50);
    const Index m = oracle::pick(gen, 1, 5);
    const Index d = oracle::pick(gen, 2, 10);
    const double c = std::pow(10.0, static_cast<double>(oracle::pick(gen, 0, 4)));
    RngStream rng(static_cast<std::uint64_t>(trial) + 1);
    ElmModel model = init_model(d, L, m, InitScheme::Ros, c, rng);
    const DenseMatrix X = oracle::uniform(gen, d, n);
    const DenseMatrix T = oracle::uniform(gen, n, m);

    std::vector<Index> cuts{0, n};
    const Index pieces = oracle::pick(gen, 1, 8);
    for (Index k = 0; k < pieces; ++k) cuts.push_back(oracle::pick(gen, 1, n - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Index len = cuts[k + 1] - cuts[k];
      oselm_update(model, LabeledBatch{X.middleCols(cuts[k], len), T.middleRows(cuts[k], len)});
    }

    const DenseMatrix H = oracle::hidden_loop(model.A, model.b, X);
    const DenseMatrix via_ridge = ridge_solve(H, T, c);
    const DenseMatrix via_qr = oracle::ridge_qr(H, T, c);
    worst_ridge = std::max(worst_ridge,
                           (model.beta - via_ridge).cwiseAbs().maxCoeff() / via_ridge.norm());
    worst_qr = std::max(worst_qr, (model.beta - via_qr).cwiseAbs().maxCoeff() / via_qr.norm());
  }
  return {worst_ridge <= 1e-8 && worst_qr <= 1e-8,
          "max rel err vs ridge_solve " + fmt("%.2e", worst_ridge) + ", vs QR " +
              fmt("%.2e", worst_qr) + " (tol 1e-8, 20 instances)"};
}

// ---- 2: growth equals the brute-force grown system --------------------------

Outcome c2_growth_oracle() {
  std::mt19937_64 gen(2002);
  double worst_k = 0.0;
  double worst_beta = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = oracle::pick(gen, 2, 6);
    const Index L0 = oracle::pick(gen, 2, 8);
    const Index m = oracle::pick(gen, 1, 3);
    const Index n = oracle::pick(gen, 20, 50);
    const double c = 50.0;
    RngStream rng(static_cast<std::uint64_t>(trial) + 7);
    ElmModel model = init_model(d, L0, m, InitScheme::Ros, c, rng);
    const DenseMatrix X = oracle::uniform(gen, d, n);
    const DenseMatrix T = oracle::uniform(gen, n, m);

    // four batches: plain, grow, plain, grow
    std::vector<Index> cuts{0, n / 4, n / 2, 3 * n / 4, n};
    std::vector<Index> width_when_seen;
    RngStream grow(static_cast<std::uint64_t>(trial) + 100);
    for (int k = 0; k < 4; ++k) {
      const Index len = cuts[k + 1] - cuts[k];
      const LabeledBatch batch{X.middleCols(cuts[k], len), T.middleRows(cuts[k], len)};
      if (k % 2 == 1) {
        ceoselm_update(model, batch, GrowthSpec{oracle::pick(gen, 1, 4), &grow});
      } else {
        oselm_update(model, batch);
      }
      for (Index i = 0; i < len; ++i) width_when_seen.push_back(model.L());
    }

    DenseMatrix H = oracle::hidden_loop(model.A, model.b, X);
    for (Index i = 0; i < n; ++i) {
      const Index w = width_when_seen[static_cast<std::size_t>(i)];
      H.row(i).tail(model.L() - w).setZero();
    }
    const DenseMatrix k_want =
        H.transpose() * H + DenseMatrix::Identity(model.L(), model.L()) / c;
    const DenseMatrix beta_want = oracle::ridge_qr(H, T, c);
    worst_k = std::max(worst_k, oracle::rel_err(model.K, k_want));
    worst_beta = std::max(worst_beta, oracle::rel_err(model.beta, beta_want));
  }
  return {worst_k <= 1e-8 && worst_beta <= 1e-8,
          "max rel err K " + fmt("%.2e", worst_k) + ", beta " + fmt("%.2e", worst_beta) +
              " (tol 1e-8, 20 instances)"};
}

// ---- 3: STAGGER ---------------------------------------------------------------

Outcome c3_stagger() {
  ExperimentConfig ao = preset("stagger", "aoselm1");
  ao.seeds = {1, 2, 3, 4, 5};
  ExperimentConfig os = preset("stagger", "oselm");
  os.seeds = ao.seeds;
  const Report ra = run_experiment(ao);
  const Report ro = run_experiment(os);
  bool ok = true;
  std::string detail = "AOS-ELM1 mean acc";
  for (const char* c : {"C1", "C2", "C3"}) {
    const double a = ra.mean(c, "accuracy");
    ok = ok && a >= 0.99;
    detail += std::string(" ") + c + "=" + fmt("%.4f", a);
  }
  const double os_c1 = ro.mean("C1", "accuracy");
  ok = ok && os_c1 <= 0.60;
  detail += " (need >= 0.99); OS-ELM C1=" + fmt("%.4f", os_c1) + " (need <= 0.60); 5 seeds x 5 folds";
  return {ok, detail};
}

// ---- 4: SEA -------------------------------------------------------------------

Outcome c4_sea() {
  const Report ra = run_experiment(preset("sea", "aoselm1"));
  const Report ro = run_experiment(preset("sea", "oselm"));
  const double c4 = 100.0 * ra.mean("C4", "accuracy");
  const double ao_c3 = 100.0 * ra.mean("C3", "accuracy");
  const double os_c3 = 100.0 * ro.mean("C3", "accuracy");
  const bool ok = std::abs(c4 - 90.34) <= 1.5 && os_c3 <= ao_c3 - 4.0;
  return {ok, "AOS-ELM1 C4=" + fmt("%.2f", c4) + " (90.34 +- 1.5); C3 AOS-ELM1=" +
                  fmt("%.2f", ao_c3) + " OS-ELM=" + fmt("%.2f", os_c3) + " (need gap >= 4)"};
}

// ---- 5: MNIST VD ordering -----------------------------------------------------

Outcome c5_vd() {
  const Report grey = run_experiment(preset("mnist-vd", "grey"));
  const Report vd = run_experiment(preset("mnist-vd", "vd"));
  const auto g = grey.values("C1", "accuracy");
  const auto v = vd.values("C2", "accuracy");
  int wins = 0;
  std::string detail;
  for (std::size_t i = 0; i < std::min(g.size(), v.size()); ++i) {
    wins += v[i] > g[i] ? 1 : 0;
    detail += " " + fmt("%.4f", v[i]) + ">" + fmt("%.4f", g[i]);
  }
  return {wins == 5 && g.size() == 5, std::to_string(wins) + "/5 seeds VD > grey:" + detail};
}

// ---- 6: sudden-drift forgetting -------------------------------------------------

Outcome c6_forgetting() {
  const Report a1 = run_experiment(preset("mnist-rd", "sudden-aoselm1"));
  const Report a2 = run_experiment(preset("mnist-rd", "sudden-aoselm2"));
  const Report sh = run_experiment(preset("mnist-rd", "shuffled-aoselm1"));
  const double old1 = 100.0 * a1.mean("C1", "accuracy");
  const double old2 = 100.0 * a2.mean("C1", "accuracy");
  const double new1 = 100.0 * a1.mean("C2", "accuracy");
  const double new2 = 100.0 * a2.mean("C2", "accuracy");
  const double s1 = 100.0 * sh.mean("C1", "accuracy");
  const double s2 = 100.0 * sh.mean("C2", "accuracy");
  const bool drop_ok = old1 - old2 >= 30.0;
  const bool new_ok = std::abs(new1 - new2) <= 3.0;
  const bool shuffled_ok = std::abs(s1 - s2) <= 5.0;
  return {drop_ok && new_ok && shuffled_ok,
          "old-concept drop " + fmt("%.2f", old1 - old2) + " (" + fmt("%.2f", old1) + " -> " +
              fmt("%.2f", old2) + ", need >= 30) " + (drop_ok ? "ok" : "MISSED") +
              "; new-concept gap " + fmt("%.2f", std::abs(new1 - new2)) + " (need <= 3) " +
              (new_ok ? "ok" : "MISSED") + "; shuffled gap " + fmt("%.2f", std::abs(s1 - s2)) +
              " (need <= 5) " + (shuffled_ok ? "ok" : "MISSED")};
}

// ---- 7: rank diagnostic ---------------------------------------------------------

ExperimentConfig rank_config(Index second_batch) {
  ExperimentConfig c;
  apply_setting(c, "concept.C1", "mnist:grey:0-9");
  c.schedule = "C1[6000] >> C1[" + std::to_string(second_batch) + "]";
  c.learner = Learner::CEOSELM;
  c.L0 = 126;
  c.delta_L = 100;
  c.c = 1e12;
  c.batch_size = 6000;
  c.seeds = {1, 2, 3, 4, 5};
  return with_data(c);
}

Outcome c7_rank() {
  const Report small = run_experiment(rank_config(20));
  const Report large = run_experiment(rank_config(2000));
  int flagged_small = 0;
  int clean_large = 0;
  std::string detail;
  for (const auto& r : small.ranks) {
    flagged_small += r.flagged && !r.solver_failed ? 1 : 0;
    detail += " " + std::to_string(r.rank_before) + "->" + std::to_string(r.rank_after);
  }
  detail += " |";
  for (const auto& r : large.ranks) {
    clean_large += !r.flagged && !r.solver_failed ? 1 : 0;
    detail += " " + std::to_string(r.rank_before) + "->" + std::to_string(r.rank_after);
  }
  return {flagged_small >= 4 && clean_large >= 4,
          "batch 20 < dL 100 flagged on " + std::to_string(flagged_small) +
              "/5, batch 2000 unflagged on " + std::to_string(clean_large) + "/5 (need 4/5):" +
              detail};
}

// ---- 8: regression with amplification ---------------------------------------------

Outcome c8_regression() {
  const Report one = run_experiment(preset("regression-rd", "one-drift"));
  const Report two = run_experiment(preset("regression-rd", "two-drifts"));
  const double r1 = one.mean("C1", "rmse");
  const double r2 = one.mean("C2", "rmse");
  const double t1 = two.mean("C1", "rmse");
  const double t2 = two.mean("C2", "rmse");
  const double t3 = two.mean("C3", "rmse");
  const auto g1 = one.values("C1", "gain");
  const auto g2 = two.values("C1", "gain");
  bool increasing = !g1.empty() && g1.size() == g2.size();
  for (std::size_t i = 0; i < g1.size() && i < g2.size(); ++i) increasing = increasing && g2[i] > g1[i];
  const bool ok = r1 <= 0.1 && r2 <= 0.05 && t1 <= 0.15 && t2 <= 0.15 && t3 <= 0.15 && increasing;
  return {ok, "one drift rmse C1=" + fmt("%.4f", r1) + " (<=0.1) C2=" + fmt("%.4f", r2) +
                  " (<=0.05); two drifts C1=" + fmt("%.4f", t1) + " C2=" + fmt("%.4f", t2) +
                  " C3=" + fmt("%.4f", t3) + " (<=0.15); C1 gain " +
                  fmt("%.2f", one.mean("C1", "gain")) + " -> " + fmt("%.2f", two.mean("C1", "gain")) +
                  (increasing ? " increasing" : " NOT increasing")};
}

// ---- 9: invariance suite ------------------------------------------------------------

Outcome c9_invariances() {
  std::mt19937_64 gen(9009);
  const int instances = 100;
  int vd_ok = 0;
  int rd_ok = 0;
  int marg_ok = 0;
  int sym_ok = 0;
  int io_ok = 0;
  for (int t = 0; t < instances; ++t) {
    const Index d = oracle::pick(gen, 1, 12);
    const Index L = oracle::pick(gen, 1, 30);
    const Index m = oracle::pick(gen, 1, 5);
    RngStream rng(static_cast<std::uint64_t>(t) + 1);
    ElmModel model = init_model(d, L, m, t % 2 ? InitScheme::Norm : InitScheme::Ros,
                                std::pow(10.0, static_cast<double>(t % 5)), rng);
    double asym = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Index n = oracle::pick(gen, 1, 40);
      oselm_update(model, LabeledBatch{oracle::uniform(gen, d, n), oracle::uniform(gen, n, m)});
      asym = std::max(asym, (model.K - model.K.transpose()).cwiseAbs().maxCoeff());
    }
    sym_ok += asym <= 1e-12 ? 1 : 0;

    const DenseMatrix X = oracle::uniform(gen, d, 15);
    const DenseMatrix before = predict_scores(model, X);

    ElmModel vd = model;
    const Index new_d = d + oracle::pick(gen, 1, 10);
    adapt_virtual(vd, new_d, rng);
    DenseMatrix padded = DenseMatrix::Zero(new_d, X.cols());
    padded.topRows(d) = X;
    vd_ok += predict_scores(vd, padded) == before ? 1 : 0;

    ElmModel rd = model;
    const Index added = oracle::pick(gen, 1, 4);
    const int id = adapt_real(rd, added, true);
    // train the new block so its scores are non-trivial
    DenseMatrix T = DenseMatrix::Zero(20, rd.m());
    T.rightCols(added) = oracle::uniform(gen, 20, added);
    ElmModel rd_trained = rd;
    oselm_update(rd_trained, LabeledBatch{oracle::uniform(gen, d, 20), T});
    rd_ok += predict_scores(rd, X).leftCols(m) == before ? 1 : 0;

    // scores outside the active block never change its classification
    DenseMatrix s = predict_scores(rd_trained, X);
    const auto active = classify_scores(rd_trained, s, 0);
    s.rightCols(added) = oracle::uniform(gen, s.rows(), added, 5.0, 10.0);
    const bool iso0 = classify_scores(rd_trained, s, 0) == active;
    DenseMatrix s2 = predict_scores(rd_trained, X);
    const auto active_new = classify_scores(rd_trained, s2, id);
    s2.leftCols(m) = oracle::uniform(gen, s2.rows(), m, 5.0, 10.0);
    const bool iso1 = classify_scores(rd_trained, s2, id) == active_new;
    marg_ok += iso0 && iso1 ? 1 : 0;

    const auto bytes = model_to_bytes(rd_trained);
    const ElmModel back = model_from_bytes(bytes);
    io_ok += back.A == rd_trained.A && back.b == rd_trained.b && back.K == rd_trained.K &&
                     back.beta == rd_trained.beta && back.concepts == rd_trained.concepts &&
                     back.c == rd_trained.c && model_to_bytes(back) == bytes &&
                     predict_scores(back, X) == predict_scores(rd_trained, X)
                 ? 1
                 : 0;
  }
  const bool ok = vd_ok == instances && rd_ok == instances && marg_ok == instances &&
                  sym_ok == instances && io_ok == instances;
  std::ostringstream d;
  d << "VD zero-pad " << vd_ok << "/" << instances << ", RD old columns " << rd_ok << "/"
    << instances << ", marginalization " << marg_ok << "/" << instances << ", K symmetry "
    << sym_ok << "/" << instances << ", save/load " << io_ok << "/" << instances;
  return {ok, d.str()};
}

// ---- 10: drift monitor ---------------------------------------------------------------

Outcome c10_monitor() {
  const std::size_t w = 200;
  const std::size_t change = 5000;
  int detected = 0;
  int quiet = 0;
  std::string delays;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution high(0.9);
    std::bernoulli_distribution low(0.5);
    DriftMonitor step(MonitorParams{w, 30, 0.2});
    std::size_t fired = 0;
    bool early = false;
    for (std::size_t t = 0; t < change + 2 * w; ++t) {
      const bool hit = t < change ? high(gen) : low(gen);
      if (step.observe(hit) == MonitorState::Drift) {
        if (t < change) {
          early = true;
          step.acknowledge();
          continue;
        }
        fired = t;
        break;
      }
    }
    if (!early && fired >= change && fired < change + w) ++detected;
    delays += " " + (fired >= change ? std::to_string(fired - change) : std::string("-"));

    DriftMonitor flat(MonitorParams{w, 30, 0.2});
    int events = 0;
    for (std::size_t t = 0; t < 100000; ++t) {
      if (flat.observe(high(gen)) == MonitorState::Drift) {
        ++events;
        flat.acknowledge();
      }
    }
    quiet += events == 0 ? 1 : 0;
  }
  return {detected == 10 && quiet == 10,
          "step 0.9->0.5 detected within " + std::to_string(w) + " on " + std::to_string(detected) +
              "/10 (delays" + delays + "); stationary 0.9 x 1e5 quiet on " +
              std::to_string(quiet) + "/10"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aoselm acceptance criteria"};
  std::vector<int> only;
  app.add_option("--criterion", only, "criterion numbers to run (default all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "OS-ELM equals offline ridge", 5, c1_offline_equivalence},
      {2, "CEOS-ELM equals grown brute-force system", 5, c2_growth_oracle},
      {3, "STAGGER accuracy", 120, c3_stagger},
      {4, "SEA accuracy", 900, c4_sea},
      {5, "MNIST VD ordering", 600, c5_vd},
      {6, "sudden-drift forgetting", 600, c6_forgetting},
      {7, "rank diagnostic", 300, c7_rank},
      {8, "regression with amplification", 300, c8_regression},
      {9, "invariance suite", 120, c9_invariances},
      {10, "drift monitor", 60, c10_monitor},
  };

  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %d %s: %s | %s | %.1fs (limit %.0fs)%s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", o.detail.c_str(), secs, c.limit_seconds,
                in_time ? "" : " over time");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

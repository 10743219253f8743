#include "aoselm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "aoselm/drift.hpp"
#include "aoselm/errors.hpp"
#include "aoselm/sequential.hpp"
#include "aoselm/serialize.hpp"

namespace aoselm {

namespace {

// Stream tags; every random draw derives from (seed, tag, ...).
enum : std::uint64_t {
  kTagData = 1,
  kTagSplit = 2,
  kTagModel = 3,
  kTagVirtual = 4,
  kTagGrowth = 5,
  kTagSchedule = 6,
  kTagCalibration = 7,
};

RngStream derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0) {
  RngStream base(seed);
  RngStream s1 = base.fork(tag);
  RngStream s2 = s1.fork(a);
  return s2.fork(b);
}

enum class SourceKind { Sea, Stagger, Regression, Mnist, Csv };

struct ConceptInfo {
  ConceptDef def;
  SourceKind kind = SourceKind::Sea;
  int index = 1;
  RegressionFn fn = RegressionFn::Sinc;
  bool hog = false;
  int lo = 0;
  int hi = 9;
  std::string path;
  std::string source_key;
  std::string block_key;
  Index width = 0;
  Index classes = 0;  // 0 for regression

  bool regression() const { return kind == SourceKind::Regression; }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

int parse_small_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("concept source: bad " + what + " '" + s + "'");
  }
}

ConceptInfo resolve_concept(const ConceptDef& def) {
  ConceptInfo info;
  info.def = def;
  const auto colon = def.source.find(':');
  const std::string kind = def.source.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : def.source.substr(colon + 1);
  if (kind == "sea") {
    info.kind = SourceKind::Sea;
    info.index = parse_small_int(rest, "SEA concept index");
    if (info.index < 1 || info.index > 4) throw ConfigError("SEA concept index must be 1..4");
    info.width = 3;
    info.classes = 2;
  } else if (kind == "stagger") {
    info.kind = SourceKind::Stagger;
    info.index = parse_small_int(rest, "STAGGER concept index");
    if (info.index < 1 || info.index > 3) throw ConfigError("STAGGER concept index must be 1..3");
    info.width = 9;
    info.classes = 2;
  } else if (kind == "regression") {
    info.kind = SourceKind::Regression;
    try {
      info.fn = parse_regression_fn(rest);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
    info.width = 1;
    info.classes = 0;
  } else if (kind == "mnist") {
    info.kind = SourceKind::Mnist;
    const auto parts = split(rest, ':');
    if (parts.size() != 2 || (parts[0] != "grey" && parts[0] != "grey+hog")) {
      throw ConfigError("mnist source must be mnist:<grey|grey+hog>:<lo>-<hi>");
    }
    info.hog = parts[0] == "grey+hog";
    const auto range = split(parts[1], '-');
    if (range.size() != 2) throw ConfigError("mnist digit range must be <lo>-<hi>");
    info.lo = parse_small_int(range[0], "digit");
    info.hi = parse_small_int(range[1], "digit");
    if (info.lo < 0 || info.hi > 9 || info.lo > info.hi) {
      throw ConfigError("mnist digit range must lie within 0-9");
    }
    info.width = 784 + (info.hog ? kHogFeatures : 0);
    info.classes = info.hi - info.lo + 1;
    info.source_key = "mnist:" + parts[1];
  } else if (kind == "csv") {
    info.kind = SourceKind::Csv;
    if (rest.empty()) throw ConfigError("csv source needs a path");
    info.path = rest;
    info.source_key = "csv:" + rest;
  } else {
    throw ConfigError("unknown concept source '" + def.source + "'");
  }
  if (info.source_key.empty()) info.source_key = "own:" + def.name;
  info.block_key = !def.block.empty() ? def.block
                   : (info.kind == SourceKind::Mnist || info.kind == SourceKind::Csv)
                       ? info.source_key
                       : def.name;
  return info;
}

// Input data shared by every trial of one run.
struct SharedData {
  bool mnist_loaded = false;
  DenseMatrix grey;  // 784 x N
  DenseMatrix hog;   // 81 x N
  std::vector<int> digits;
  std::map<std::string, LabeledSamples> csv;
};

void load_shared(const ExperimentConfig& config, std::vector<ConceptInfo>& concepts,
                 SharedData& shared) {
  for (auto& info : concepts) {
    if (info.kind == SourceKind::Mnist && !shared.mnist_loaded) {
      const std::filesystem::path dir(config.data_dir);
      auto images = load_idx_images(dir / "images-idx3-ubyte");
      auto labels = load_idx_labels(dir / "labels-idx1-ubyte");
      if (images.X.rows() != 784) throw FormatError("mnist images must be 28x28");
      if (static_cast<Index>(labels.labels.size()) != images.X.cols()) {
        throw FormatError("mnist image and label counts differ");
      }
      Index n = images.X.cols();
      if (config.mnist_limit > 0) n = std::min(n, config.mnist_limit);
      shared.grey = images.X.leftCols(n);
      shared.digits.assign(labels.labels.begin(), labels.labels.begin() + n);
      shared.hog = hog_matrix(shared.grey);
      shared.mnist_loaded = true;
    }
    if (info.kind == SourceKind::Csv) {
      auto it = shared.csv.find(info.path);
      if (it == shared.csv.end()) it = shared.csv.emplace(info.path, read_csv(info.path)).first;
      info.width = it->second.X.rows();
      const int top = it->second.labels.empty()
                          ? 0
                          : *std::max_element(it->second.labels.begin(), it->second.labels.end());
      info.classes = top + 1;
    }
  }
}

struct ConceptData {
  LabeledSamples train;  // labels are global class ids
  LabeledSamples test;
};

// Index split of n items for one trial.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

Split make_split(const ExperimentConfig& config, std::size_t n, std::uint64_t seed, int trial,
                 std::uint64_t salt, bool shuffle) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Split s;
  if (config.eval == EvalProtocol::KFold) {
    if (shuffle) {
      auto rng = derive(seed, kTagSplit, salt);
      order = random_permutation(rng, n);
    }
    const std::size_t k = static_cast<std::size_t>(config.folds);
    const std::size_t f = static_cast<std::size_t>(trial);
    const std::size_t lo = f * n / k;
    const std::size_t hi = (f + 1) * n / k;
    for (std::size_t i = 0; i < n; ++i) (i >= lo && i < hi ? s.test : s.train).push_back(order[i]);
  } else {
    if (shuffle) {
      auto rng = derive(seed, kTagSplit, salt, static_cast<std::uint64_t>(trial) + 1);
      order = random_permutation(rng, n);
    }
    const auto n_test = static_cast<std::size_t>(std::llround(config.test_fraction * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) (i < n - n_test ? s.train : s.test).push_back(order[i]);
  }
  return s;
}

LabeledSamples take(const LabeledSamples& all, const std::vector<std::size_t>& idx) {
  LabeledSamples out;
  out.X.resize(all.X.rows(), static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.X.col(static_cast<Index>(i)) = all.X.col(static_cast<Index>(idx[i]));
    if (!all.labels.empty()) out.labels.push_back(all.labels[idx[i]]);
    if (!all.targets.empty()) out.targets.push_back(all.targets[idx[i]]);
  }
  return out;
}

LabeledSamples generate(const ConceptInfo& info, const ExperimentConfig& config, RngStream& rng) {
  const Index n = config.samples_per_concept;
  switch (info.kind) {
    case SourceKind::Sea: return gen_sea(n, info.index, config.sea_noise, rng);
    case SourceKind::Stagger: return gen_stagger(n, info.index, rng);
    case SourceKind::Regression: {
      auto r = gen_regression(info.fn, n, rng);
      LabeledSamples out;
      out.X = Eigen::Map<const DenseMatrix>(r.x.data(), 1, n);
      out.targets = std::move(r.y);
      return out;
    }
    default: break;
  }
  throw ConfigError("internal: generate called for a file-backed concept");
}

std::vector<ConceptData> build_trial_data(const ExperimentConfig& config,
                                          const std::vector<ConceptInfo>& concepts,
                                          const SharedData& shared, std::uint64_t seed, int trial) {
  std::vector<ConceptData> out(concepts.size());
  std::optional<Split> mnist_split;
  std::map<std::string, Split> csv_split;
  for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
    const auto& info = concepts[ci];
    if (info.kind == SourceKind::Mnist) {
      if (!mnist_split) mnist_split = make_split(config, shared.digits.size(), seed, trial, 0, true);
      auto pick = [&](const std::vector<std::size_t>& idx) {
        std::vector<std::size_t> keep;
        for (auto i : idx) {
          if (shared.digits[i] >= info.lo && shared.digits[i] <= info.hi) keep.push_back(i);
        }
        LabeledSamples s;
        s.X.resize(info.width, static_cast<Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) {
          const auto col = static_cast<Index>(k);
          s.X.col(col).head(784) = shared.grey.col(static_cast<Index>(keep[k]));
          if (info.hog) s.X.col(col).tail(kHogFeatures) = shared.hog.col(static_cast<Index>(keep[k]));
          s.labels.push_back(shared.digits[keep[k]]);
        }
        return s;
      };
      out[ci].train = pick(mnist_split->train);
      out[ci].test = pick(mnist_split->test);
    } else if (info.kind == SourceKind::Csv) {
      const auto& all = shared.csv.at(info.path);
      auto it = csv_split.find(info.path);
      if (it == csv_split.end()) {
        it = csv_split.emplace(info.path, make_split(config, static_cast<std::size_t>(all.size()),
                                                     seed, trial, 1 + csv_split.size(), true))
                 .first;
      }
      out[ci].train = take(all, it->second.train);
      out[ci].test = take(all, it->second.test);
    } else {
      // k-fold reuses one sample pool per seed; holdout draws a fresh pool per trial.
      const std::uint64_t draw = config.eval == EvalProtocol::KFold ? 0 : static_cast<std::uint64_t>(trial) + 1;
      auto rng = derive(seed, kTagData, ci, draw);
      const auto all = generate(info, config, rng);
      const auto s = make_split(config, static_cast<std::size_t>(all.size()), seed, trial, 0, false);
      out[ci].train = take(all, s.train);
      out[ci].test = take(all, s.test);
    }
  }
  return out;
}

struct BlockInfo {
  Index width = 0;
  int label_offset = 0;
};

DenseMatrix pad_rows(const DenseMatrix& X, Index d) {
  if (X.rows() == d) return X;
  DenseMatrix out = DenseMatrix::Zero(d, X.cols());
  out.topRows(X.rows()) = X;
  return out;
}

}  // namespace

std::vector<double> Report::values(const std::string& concept_name, const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.concept_name == concept_name && r.metric == metric) out.push_back(r.value);
  }
  return out;
}

double Report::mean(const std::string& concept_name, const std::string& metric) const {
  const auto v = values(concept_name, metric);
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

int trial_count(const ExperimentConfig& config) {
  return config.eval == EvalProtocol::KFold ? config.folds : config.trials;
}

Report run_experiment(const ExperimentConfig& config) {
  validate(config);
  std::vector<ConceptInfo> concepts;
  for (const auto& def : config.concepts) concepts.push_back(resolve_concept(def));
  SharedData shared;
  load_shared(config, concepts, shared);

  const auto schedule = parse_schedule(config.schedule);
  std::map<std::string, std::size_t> concept_index;
  for (std::size_t i = 0; i < concepts.size(); ++i) concept_index[concepts[i].def.name] = i;

  const bool adaptive = config.learner == Learner::AOSELM1 || config.learner == Learner::AOSELM2;
  const bool grows = config.learner == Learner::AOSELM2 || config.learner == Learner::CEOSELM;

  // Concepts in first-appearance order, and the concept trained last.
  std::vector<std::size_t> used;
  for (const auto& seg : schedule) {
    for (const auto& item : seg.items) {
      const auto ci = concept_index.at(item.concept_name);
      if (std::find(used.begin(), used.end(), ci) == used.end()) used.push_back(ci);
    }
  }
  const std::size_t latest = concept_index.at(schedule.back().items.back().concept_name);

  const bool regression = concepts[used.front()].regression();
  Index global_classes = 0;
  std::map<std::string, BlockInfo> blocks;
  for (auto ci : used) {
    const auto& info = concepts[ci];
    if (info.regression() != regression) {
      throw ConfigError("config: a schedule cannot mix regression and classification concepts");
    }
    if (!adaptive && info.width != concepts[used.front()].width) {
      throw ConfigError(std::string("config: ") + std::string(to_string(config.learner)) +
                        " cannot follow a change in the number of input attributes");
    }
    const int offset = info.kind == SourceKind::Mnist ? info.lo : 0;
    auto [it, fresh] = blocks.try_emplace(info.block_key, BlockInfo{0, offset});
    it->second.label_offset = std::min(it->second.label_offset, offset);
    global_classes = std::max(global_classes, info.classes + offset);
  }
  for (auto ci : used) {
    const auto& info = concepts[ci];
    auto& blk = blocks.at(info.block_key);
    const int offset = info.kind == SourceKind::Mnist ? info.lo : 0;
    blk.width = std::max(blk.width, regression ? Index{1} : info.classes + offset - blk.label_offset);
  }

  Report report;
  report.config = config;
  report.protocol = config.eval == EvalProtocol::KFold
                        ? "k-fold over each concept's sample pool (k=" + std::to_string(config.folds) +
                              "); training folds keep stream order"
                        : "holdout, test_fraction=" + std::to_string(config.test_fraction) +
                              ", fresh split per trial";

  const int trials = trial_count(config);
  for (const auto seed : config.seeds) {
    for (int trial = 0; trial < trials; ++trial) {
      const auto data = build_trial_data(config, concepts, shared, seed, trial);

      // Pools and sample counts.
      std::vector<ConceptPool> pools(concepts.size());
      std::map<std::string, std::size_t> first_of_source;
      for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
        pools[ci].name = concepts[ci].def.name;
        pools[ci].samples = data[ci].train;
        const auto [it, fresh] = first_of_source.try_emplace(concepts[ci].source_key, ci);
        pools[ci].source = fresh ? -1 : static_cast<int>(it->second);
      }
      std::map<std::string, Index> remaining;
      for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
        remaining[concepts[ci].source_key] = pools[ci].samples.size();
      }
      std::vector<ScheduleSegment> segments;
      for (const auto& seg : schedule) {
        ScheduleSegment out;
        out.drift = seg.drift;
        std::map<std::string, int> open;
        for (const auto& item : seg.items) {
          if (!item.amount) ++open[concepts[concept_index.at(item.concept_name)].source_key];
        }
        std::vector<Index> counts(seg.items.size(), 0);
        for (std::size_t k = 0; k < seg.items.size(); ++k) {
          const auto ci = concept_index.at(seg.items[k].concept_name);
          if (const auto& a = seg.items[k].amount) {
            counts[k] = a->fraction ? static_cast<Index>(std::floor(
                                          a->value * static_cast<double>(pools[ci].samples.size())))
                                    : static_cast<Index>(a->value);
            remaining[concepts[ci].source_key] -= counts[k];
          }
        }
        std::map<std::string, Index> share;
        for (const auto& [key, n] : open) share[key] = std::max<Index>(0, remaining[key]) / n;
        for (std::size_t k = 0; k < seg.items.size(); ++k) {
          const auto ci = concept_index.at(seg.items[k].concept_name);
          if (!seg.items[k].amount) {
            counts[k] = share[concepts[ci].source_key];
            remaining[concepts[ci].source_key] -= counts[k];
          }
          out.pools.push_back(ci);
        }
        out.counts = std::move(counts);
        segments.push_back(std::move(out));
      }

      auto schedule_rng = derive(seed, kTagSchedule, static_cast<std::uint64_t>(trial));
      const auto batches = compose_schedule(pools, segments, config.batch_size, schedule_rng);

      // Model.
      auto model_rng = derive(seed, kTagModel, static_cast<std::uint64_t>(trial));
      auto virtual_rng = derive(seed, kTagVirtual, static_cast<std::uint64_t>(trial));
      auto growth_rng = derive(seed, kTagGrowth, static_cast<std::uint64_t>(trial));
      std::map<std::string, int> block_id;
      ElmModel model;
      if (adaptive) {
        Index d0 = 0;
        std::vector<std::string> first_blocks;
        for (auto ci : segments.front().pools) {
          d0 = std::max(d0, concepts[ci].width);
          const auto& key = concepts[ci].block_key;
          if (std::find(first_blocks.begin(), first_blocks.end(), key) == first_blocks.end()) {
            first_blocks.push_back(key);
          }
        }
        model = init_model(d0, config.L0, blocks.at(first_blocks.front()).width, config.scheme,
                           config.c, model_rng, config.activation);
        block_id[first_blocks.front()] = 0;
        for (std::size_t k = 1; k < first_blocks.size(); ++k) {
          block_id[first_blocks[k]] = adapt_real(model, blocks.at(first_blocks[k]).width, true);
        }
      } else {
        model = init_model(concepts[used.front()].width, config.L0,
                           regression ? 1 : global_classes, config.scheme, config.c, model_rng,
                           config.activation);
      }

      PrequentialTrace trace(config.trace_window);
      DriftMonitor monitor(config.monitor);
      const auto t0 = std::chrono::steady_clock::now();

      for (const auto& batch : batches) {
        Index pending_growth = 0;
        if (batch.marker) {
          const auto& mk = *batch.marker;
          if (adaptive) {
            std::vector<std::string> new_blocks;
            for (auto p : mk.new_pools) {
              const auto& key = concepts[p].block_key;
              if (!block_id.contains(key) &&
                  std::find(new_blocks.begin(), new_blocks.end(), key) == new_blocks.end()) {
                new_blocks.push_back(key);
              }
            }
            if (!new_blocks.empty() && mk.type != DriftType::RD && mk.type != DriftType::HD) {
              throw ConfigError("config: schedule segment " + std::to_string(mk.segment) +
                                " introduces new classes without an RD or HD transition");
            }
            const bool widen = mk.new_d > model.d();
            std::size_t k = 0;
            if (widen && !new_blocks.empty() && mk.type == DriftType::HD) {
              block_id[new_blocks[0]] = adapt_hybrid(model, mk.new_d, blocks.at(new_blocks[0]).width,
                                                     true, virtual_rng);
              k = 1;
            } else if (widen) {
              adapt_virtual(model, mk.new_d, virtual_rng);
            }
            for (; k < new_blocks.size(); ++k) {
              block_id[new_blocks[k]] = adapt_real(model, blocks.at(new_blocks[k]).width, true);
            }
          }
          if (grows) pending_growth = config.delta_L;
        }

        const Index n = batch.size();
        DenseMatrix T = DenseMatrix::Zero(n, model.m());
        const DenseMatrix scores = predict_scores(model, batch.X);
        for (Index i = 0; i < n; ++i) {
          const auto& info = concepts[static_cast<std::size_t>(batch.pool[static_cast<std::size_t>(i)])];
          if (regression) {
            const Index col = adaptive ? model.block(block_id.at(info.block_key)).col_start : 0;
            T(i, col) = batch.targets[static_cast<std::size_t>(i)];
            continue;
          }
          const int global = batch.labels[static_cast<std::size_t>(i)];
          Index col_start = 0;
          Index width = model.m();
          int truth = global;
          if (adaptive) {
            const auto& blk = model.block(block_id.at(info.block_key));
            col_start = blk.col_start;
            width = blk.width;
            truth = global - blocks.at(info.block_key).label_offset;
          }
          Index pred = 0;
          for (Index j = 1; j < width; ++j) {
            if (scores(i, col_start + j) > scores(i, col_start + pred)) pred = j;
          }
          const bool correct = pred == truth;
          trace.add(correct);
          const auto before = monitor.state();
          const auto after = monitor.observe(correct);
          if (after != before) {
            report.events.push_back({trial, seed, batch.position + static_cast<std::size_t>(i) + 1, after});
          }
          if (after == MonitorState::Drift) monitor.acknowledge();
          T(i, col_start + truth) = 1.0;
        }

        const LabeledBatch lb{batch.X, T};
        if (pending_growth > 0) {
          RankRecord rec;
          rec.trial = trial;
          rec.seed = seed;
          rec.position = batch.position;
          rec.L_before = model.L();
          rec.delta_L = pending_growth;
          rec.batch = n;
          const std::size_t before = config.rank_diagnostics ? p_hat_rank(model.K) : 0;
          try {
            ceoselm_update(model, lb, GrowthSpec{pending_growth, &growth_rng});
            if (config.rank_diagnostics) {
              const auto v = underfit_check(model, before, pending_growth);
              rec.rank_before = v.rank_before;
              rec.rank_after = v.rank_after;
              rec.flagged = v.flagged;
            }
          } catch (const SolverError& e) {
            rec.solver_failed = true;
            if (e.ranks()) {
              rec.rank_before = e.ranks()->rank_before;
              rec.rank_after = e.ranks()->rank_after;
            }
            rec.flagged = rec.rank_after <= rec.rank_before;
            oselm_update(model, lb);
          }
          report.ranks.push_back(rec);
        } else {
          oselm_update(model, lb);
        }
      }
      trace.finish();
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      // Scoring on held-out samples.
      auto row = [&](const std::string& concept_name, const std::string& metric, double value) {
        report.rows.push_back({trial, seed, concept_name, metric, value});
      };
      std::map<std::size_t, double> acc_of;
      for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
        if (std::find(used.begin(), used.end(), ci) == used.end()) continue;
        const auto& info = concepts[ci];
        const auto& test = data[ci].test;
        if (test.size() == 0 || info.width > model.d()) continue;
        const DenseMatrix X = pad_rows(test.X, model.d());
        const int id = adaptive ? block_id.at(info.block_key) : 0;
        if (regression) {
          ElmModel unit = model;
          unit.block(id).gain = 1.0;
          double gain = 1.0;
          if (config.gain_fit) {
            auto cal_rng = derive(seed, kTagCalibration, ci, static_cast<std::uint64_t>(trial));
            const auto cal = gen_regression(info.fn, config.calibration_size, cal_rng);
            const DenseMatrix cx = Eigen::Map<const DenseMatrix>(cal.x.data(), 1, config.calibration_size);
            gain = fit_concept_gain(unit, id, pad_rows(cx, model.d()), cal.y, default_gain_grid());
            if (adaptive) set_concept_gain(model, id, gain);
          }
          const auto raw = predict_regression(unit, X, id);
          double sse = 0.0;
          for (std::size_t i = 0; i < raw.size(); ++i) {
            const double e = gain * raw[i] - test.targets[i];
            sse += e * e;
          }
          row(info.def.name, "rmse", std::sqrt(sse / static_cast<double>(raw.size())));
          row(info.def.name, "gain", gain);
          continue;
        }
        const DenseMatrix scores = predict_scores(model, X);
        Index col_start = 0;
        Index width = model.m();
        int offset = 0;
        if (adaptive) {
          const auto& blk = model.block(id);
          col_start = blk.col_start;
          width = blk.width;
          offset = blocks.at(info.block_key).label_offset;
        }
        const auto pred = argmax_rows(scores, col_start, width);
        ConfusionMatrix conf(static_cast<std::size_t>(width));
        for (std::size_t i = 0; i < pred.size(); ++i) {
          conf.add(static_cast<std::size_t>(test.labels[i] - offset), static_cast<std::size_t>(pred[i]));
        }
        const double acc = accuracy(conf);
        acc_of[ci] = acc;
        row(info.def.name, "accuracy", acc);
        try {
          const auto k = cohen_kappa(conf);
          row(info.def.name, "kappa", k.kappa);
          row(info.def.name, "kappa_error", k.kappa_error);
        } catch (const ArgumentError&) {
          row(info.def.name, "kappa", std::numeric_limits<double>::quiet_NaN());
          row(info.def.name, "kappa_error", std::numeric_limits<double>::quiet_NaN());
        }
      }
      if (acc_of.contains(latest)) {
        for (const auto& [ci, acc] : acc_of) {
          if (ci == latest) continue;
          row(concepts[ci].def.name, "forgetting", forgetting_capability(acc_of[latest], {acc})[0]);
        }
      }
      if (!trace.points().empty()) {
        double hits = 0.0;
        std::size_t prev = 0;
        for (const auto& p : trace.points()) {
          hits += p.accuracy * static_cast<double>(p.position - prev);
          prev = p.position;
        }
        row("*", "prequential_accuracy", hits / static_cast<double>(prev));
      }
      row("*", "hidden_nodes", static_cast<double>(model.L()));
      row("*", "train_seconds", seconds);

      report.traces.push_back({trial, seed, trace.points()});
      report.models.push_back({trial, seed, std::move(model)});
    }
  }
  return report;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + (dir / name).string() + "'");
    out << std::setprecision(10);
    return out;
  };
  {
    auto out = open("report.csv");
    out << "trial,seed,concept,metric,value\n";
    for (const auto& r : report.rows) {
      out << r.trial << ',' << r.seed << ',' << r.concept_name << ',' << r.metric << ',' << r.value << '\n';
    }
  }
  {
    auto out = open("ranks.csv");
    out << "trial,seed,position,L_before,delta_L,batch,rank_before,rank_after,flagged,solver_failed\n";
    for (const auto& r : report.ranks) {
      out << r.trial << ',' << r.seed << ',' << r.position << ',' << r.L_before << ',' << r.delta_L
          << ',' << r.batch << ',' << r.rank_before << ',' << r.rank_after << ',' << r.flagged << ','
          << r.solver_failed << '\n';
    }
  }
  {
    auto out = open("events.csv");
    out << "trial,seed,position,state\n";
    for (const auto& e : report.events) {
      out << e.trial << ',' << e.seed << ',' << e.position << ',' << to_string(e.state) << '\n';
    }
  }
  {
    auto out = open("config_resolved.txt");
    out << format_config(report.config) << "# protocol: " << report.protocol << '\n';
  }
  for (const auto& t : report.traces) {
    write_trace_csv(dir / ("trace_" + std::to_string(t.seed) + "_" + std::to_string(t.trial) + ".csv"),
                    t.points);
  }
  for (const auto& m : report.models) {
    save_model(m.model,
               dir / ("model_" + std::to_string(m.seed) + "_" + std::to_string(m.trial) + ".bin"));
  }
}

std::vector<std::string> bench_names() {
  return {"sea", "stagger", "mnist-vd", "mnist-rd", "mnist-hd", "regression-rd"};
}

std::vector<ExperimentConfig> bench_preset(const std::string& name, bool full) {
  std::vector<ExperimentConfig> out;
  auto variant = [&](const ExperimentConfig& base, const std::string& suffix, Learner learner,
                     Index delta_L) {
    ExperimentConfig c = base;
    c.name = base.name + "-" + suffix;
    c.learner = learner;
    c.delta_L = delta_L;
    out.push_back(c);
  };
  ExperimentConfig base;
  base.name = name;
  if (name == "sea") {
    base.concepts = {{"C1", "sea:1", ""}, {"C2", "sea:2", ""}, {"C3", "sea:3", ""}, {"C4", "sea:4", ""}};
    base.schedule = "C1 >>RD C2 >>RD C3 >>RD C4";
    base.eval = EvalProtocol::KFold;
    base.folds = 5;
    base.samples_per_concept = 20000;
    base.sea_noise = 0.1;
    base.batch_size = 1000;
    base.L0 = full ? 3000 : 1000;
    base.c = 100.0;
    variant(base, "aoselm1", Learner::AOSELM1, 0);
    variant(base, "aoselm2", Learner::AOSELM2, full ? 500 : 100);
    variant(base, "oselm", Learner::OSELM, 0);
  } else if (name == "stagger") {
    base.concepts = {{"C1", "stagger:1", ""}, {"C2", "stagger:2", ""}, {"C3", "stagger:3", ""}};
    base.schedule = "C1 >>RD C2 >>RD C3";
    base.eval = EvalProtocol::KFold;
    base.folds = 5;
    base.samples_per_concept = 4400;
    base.batch_size = 220;
    base.L0 = 9;
    base.c = 10.0;
    variant(base, "aoselm1", Learner::AOSELM1, 0);
    variant(base, "aoselm2", Learner::AOSELM2, 5);
    variant(base, "oselm", Learner::OSELM, 0);
  } else if (name == "mnist-vd") {
    base.concepts = {{"C1", "mnist:grey:0-9", ""}, {"C2", "mnist:grey+hog:0-9", ""}};
    base.L0 = full ? 2000 : 500;
    base.mnist_limit = full ? 0 : 10000;
    base.trials = full ? 10 : 1;
    base.seeds = {1, 2, 3, 4, 5};
    ExperimentConfig grey = base;
    grey.schedule = "C1";
    variant(grey, "grey", Learner::AOSELM1, 0);
    base.schedule = "C1[2000] >>VD C2";
    variant(base, "vd", Learner::AOSELM1, 0);
  } else if (name == "mnist-rd") {
    base.concepts = {{"C1", "mnist:grey:0-5", ""}, {"C2", "mnist:grey:6-9", ""}};
    base.L0 = full ? 2000 : 500;
    base.mnist_limit = full ? 0 : 10000;
    base.trials = full ? 10 : 1;
    base.seeds = {1, 2, 3};
    base.schedule = "C1 >>RD C2";
    variant(base, "sudden-aoselm1", Learner::AOSELM1, 0);
    variant(base, "sudden-aoselm2", Learner::AOSELM2, base.L0 / 4);
    base.schedule = "C1[0.5] >>RD shuffled(C1, C2)";
    variant(base, "shuffled-aoselm1", Learner::AOSELM1, 0);
    variant(base, "shuffled-aoselm2", Learner::AOSELM2, base.L0 / 4);
  } else if (name == "mnist-hd") {
    base.concepts = {{"C1", "mnist:grey:0-5", ""},
                     {"C3", "mnist:grey+hog:0-5", ""},
                     {"C4", "mnist:grey+hog:6-9", ""}};
    base.L0 = full ? 2000 : 500;
    base.mnist_limit = full ? 0 : 10000;
    base.trials = full ? 10 : 1;
    base.seeds = {1, 2, 3};
    base.schedule = "C1[0.5] >>HD shuffled(C3, C4)";
    variant(base, "aoselm1", Learner::AOSELM1, 0);
  } else if (name == "regression-rd") {
    base.concepts = {{"C1", "regression:sinc", ""},
                     {"C2", "regression:sinus", ""},
                     {"C3", "regression:gaussian", ""}};
    base.scheme = InitScheme::Norm;
    base.L0 = 100;
    base.c = 1e8;
    base.samples_per_concept = 55000;
    base.test_fraction = 5000.0 / 55000.0;
    base.batch_size = 1000;
    base.seeds = {1, 2, 3};
    base.schedule = "C1 >>RD C2";
    variant(base, "one-drift", Learner::AOSELM1, 0);
    base.schedule = "C1 >>RD C2 >>RD C3";
    variant(base, "two-drifts", Learner::AOSELM1, 0);
  } else {
    throw ConfigError("unknown bench '" + name + "'");
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ReportRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::string>, std::size_t> where;
  std::vector<std::vector<double>> groups;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.concept_name, r.metric);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, out.size()).first;
      out.push_back({r.concept_name, r.metric, 0.0, 0.0, 0});
      groups.emplace_back();
    }
    groups[it->second].push_back(r.value);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    const auto& v = groups[g];
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    out[g].mean = mean;
    out[g].stddev = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out[g].n = v.size();
  }
  return out;
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "trial,seed,concept,metric,value") {
    throw FormatError(path.string() + ": not a report.csv (bad header)");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) + " needs 5 fields");
    }
    try {
      rows.push_back({std::stoi(f[0]), std::stoull(f[1]), f[2], f[3], std::stod(f[4])});
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) + " is malformed");
    }
  }
  return rows;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << "concept,metric,mean,std,n\n" << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.concept_name << ',' << r.metric << ',' << r.mean << ',' << r.stddev << ',' << r.n << '\n';
  }
}

}  // namespace aoselm

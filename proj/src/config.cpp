#include "aoselm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "aoselm/errors.hpp"

namespace aoselm {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: '" + std::string(key) + "' expects an integer, got '" +
                      std::string(value) + "'");
  }
  return v;
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || std::isnan(v)) {
    throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = lower(value);
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("config: '" + std::string(key) + "' expects on/off, got '" +
                    std::string(value) + "'");
}

std::string real_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '+';
}

}  // namespace

std::string_view to_string(Learner l) {
  switch (l) {
    case Learner::OSELM: return "OSELM";
    case Learner::CEOSELM: return "CEOSELM";
    case Learner::AOSELM1: return "AOSELM1";
    case Learner::AOSELM2: return "AOSELM2";
  }
  return "?";
}

std::string_view to_string(EvalProtocol p) {
  return p == EvalProtocol::Holdout ? "holdout" : "kfold";
}

Learner parse_learner(std::string_view s) {
  std::string v = lower(s);
  v.erase(std::remove(v.begin(), v.end(), '-'), v.end());
  if (v == "oselm") return Learner::OSELM;
  if (v == "ceoselm") return Learner::CEOSELM;
  if (v == "aoselm1") return Learner::AOSELM1;
  if (v == "aoselm2") return Learner::AOSELM2;
  throw ConfigError("unknown learner '" + std::string(s) +
                    "' (expected OSELM, CEOSELM, AOSELM1 or AOSELM2)");
}

EvalProtocol parse_eval_protocol(std::string_view s) {
  const auto v = lower(s);
  if (v == "holdout") return EvalProtocol::Holdout;
  if (v == "kfold" || v == "k-fold" || v == "cv") return EvalProtocol::KFold;
  throw ConfigError("unknown evaluation protocol '" + std::string(s) + "'");
}

std::vector<ParsedSegment> parse_schedule(std::string_view text) {
  const std::string_view s = text;
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("schedule: " + why + " at offset " + std::to_string(pos) + " in '" +
                       std::string(text) + "'");
  };
  auto skip_space = [&] {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  };
  auto word = [&] {
    const std::size_t start = pos;
    while (pos < s.size() && is_name_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  };

  auto parse_item = [&]() {
    skip_space();
    ScheduleItem item;
    item.concept_name = std::string(word());
    if (item.concept_name.empty()) throw fail("expected a concept name");
    if (pos < s.size() && s[pos] == '[') {
      const auto close = s.find(']', pos);
      if (close == std::string_view::npos) throw fail("unterminated '['");
      const auto body = trim(s.substr(pos + 1, close - pos - 1));
      Amount a;
      a.fraction = body.find('.') != std::string_view::npos;
      a.value = parse_real("schedule amount", body);
      if (a.value < 0.0 || (a.fraction && a.value > 1.0) ||
          (!a.fraction && a.value != std::floor(a.value))) {
        throw fail("bad amount '" + std::string(body) + "'");
      }
      item.amount = a;
      pos = close + 1;
    }
    skip_space();
    return item;
  };

  std::vector<ParsedSegment> out;
  DriftType pending = DriftType::None;
  while (true) {
    ParsedSegment seg;
    seg.drift = pending;
    skip_space();
    if (s.substr(pos).starts_with("shuffled(")) {
      pos += 9;
      while (true) {
        seg.items.push_back(parse_item());
        if (pos < s.size() && s[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < s.size() && s[pos] == ')') {
          ++pos;
          break;
        }
        throw fail("expected ',' or ')'");
      }
      skip_space();
    } else {
      seg.items.push_back(parse_item());
    }
    out.push_back(std::move(seg));
    if (pos == s.size()) break;
    if (!s.substr(pos).starts_with(">>")) throw fail("expected '>>'");
    pos += 2;
    // the drift tag is glued to ">>"; a bare ">>" must be followed by a space
    const auto tag = word();
    if (tag.empty()) {
      pending = DriftType::None;
    } else if (tag == "RD" || tag == "VD" || tag == "HD") {
      pending = parse_drift_type(tag);
    } else {
      throw fail("unknown drift tag '" + std::string(tag) + "'");
    }
  }
  return out;
}

std::string format_schedule(const std::vector<ParsedSegment>& schedule) {
  std::ostringstream out;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& seg = schedule[i];
    if (i > 0) {
      out << " >>" << (seg.drift == DriftType::None ? "" : std::string(to_string(seg.drift))) << ' ';
    }
    if (seg.items.size() > 1) out << "shuffled(";
    for (std::size_t k = 0; k < seg.items.size(); ++k) {
      if (k > 0) out << ", ";
      out << seg.items[k].concept_name;
      if (const auto& a = seg.items[k].amount) {
        out << '[';
        if (a->fraction) {
          std::string t = real_text(a->value);
          if (t.find('.') == std::string::npos) t += ".0";
          out << t;
        } else {
          out << static_cast<long long>(a->value);
        }
        out << ']';
      }
    }
    if (seg.items.size() > 1) out << ')';
  }
  return out.str();
}

void apply_setting(ExperimentConfig& config, std::string_view key_in, std::string_view value_in) {
  const std::string key(trim(key_in));
  const std::string_view value = trim(value_in);
  try {
    if (key == "name") {
      config.name = std::string(value);
    } else if (key == "learner") {
      config.learner = parse_learner(value);
    } else if (key == "L0") {
      config.L0 = parse_integer<Index>(key, value);
    } else if (key == "delta_L") {
      config.delta_L = parse_integer<Index>(key, value);
    } else if (key == "c") {
      config.c = parse_real(key, value);
    } else if (key == "scheme") {
      config.scheme = parse_init_scheme(value);
    } else if (key == "activation") {
      config.activation = parse_activation(value);
    } else if (key == "batch_size") {
      config.batch_size = parse_integer<Index>(key, value);
    } else if (key == "seeds") {
      config.seeds.clear();
      std::string list(value);
      std::replace(list.begin(), list.end(), ',', ' ');
      std::istringstream in(list);
      std::string tok;
      while (in >> tok) config.seeds.push_back(parse_integer<std::uint64_t>(key, tok));
    } else if (key.starts_with("concept.")) {
      ConceptDef def;
      def.name = key.substr(8);
      const auto at = value.find('@');
      def.source = std::string(value.substr(0, at));
      if (at != std::string_view::npos) def.block = std::string(value.substr(at + 1));
      auto it = std::find_if(config.concepts.begin(), config.concepts.end(),
                             [&](const ConceptDef& c) { return c.name == def.name; });
      if (it != config.concepts.end()) {
        *it = def;
      } else {
        config.concepts.push_back(def);
      }
    } else if (key == "schedule") {
      config.schedule = std::string(value);
    } else if (key == "eval") {
      config.eval = parse_eval_protocol(value);
    } else if (key == "folds") {
      config.folds = parse_integer<int>(key, value);
    } else if (key == "trials") {
      config.trials = parse_integer<int>(key, value);
    } else if (key == "test_fraction") {
      config.test_fraction = parse_real(key, value);
    } else if (key == "samples_per_concept") {
      config.samples_per_concept = parse_integer<Index>(key, value);
    } else if (key == "sea_noise") {
      config.sea_noise = parse_real(key, value);
    } else if (key == "data_dir") {
      config.data_dir = std::string(value);
    } else if (key == "mnist_limit") {
      config.mnist_limit = parse_integer<Index>(key, value);
    } else if (key == "monitor.window") {
      config.monitor.window = parse_integer<std::size_t>(key, value);
    } else if (key == "monitor.warn_threshold") {
      config.monitor.warn_threshold = parse_integer<std::size_t>(key, value);
    } else if (key == "monitor.drift_threshold") {
      config.monitor.drift_threshold = parse_real(key, value);
    } else if (key == "trace_window") {
      config.trace_window = parse_integer<std::size_t>(key, value);
    } else if (key == "rank_diagnostics") {
      config.rank_diagnostics = parse_bool(key, value);
    } else if (key == "gain_fit") {
      config.gain_fit = parse_bool(key, value);
    } else if (key == "calibration_size") {
      config.calibration_size = parse_integer<Index>(key, value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  } catch (const ArgumentError& e) {
    throw ConfigError("config: " + key + ": " + e.what());
  }
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(config, body.substr(0, eq), body.substr(eq + 1));
  }
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(base, buf.str());
  return base;
}

std::string format_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "name=" << config.name << '\n'
      << "learner=" << to_string(config.learner) << '\n'
      << "L0=" << config.L0 << '\n'
      << "delta_L=" << config.delta_L << '\n'
      << "c=" << real_text(config.c) << '\n'
      << "scheme=" << to_string(config.scheme) << '\n'
      << "activation=" << to_string(config.activation) << '\n'
      << "batch_size=" << config.batch_size << '\n'
      << "seeds=";
  for (std::size_t i = 0; i < config.seeds.size(); ++i) out << (i ? "," : "") << config.seeds[i];
  out << '\n';
  for (const auto& def : config.concepts) {
    out << "concept." << def.name << '=' << def.source;
    if (!def.block.empty()) out << '@' << def.block;
    out << '\n';
  }
  out << "schedule=" << config.schedule << '\n'
      << "eval=" << to_string(config.eval) << '\n'
      << "folds=" << config.folds << '\n'
      << "trials=" << config.trials << '\n'
      << "test_fraction=" << real_text(config.test_fraction) << '\n'
      << "samples_per_concept=" << config.samples_per_concept << '\n'
      << "sea_noise=" << real_text(config.sea_noise) << '\n'
      << "data_dir=" << config.data_dir << '\n'
      << "mnist_limit=" << config.mnist_limit << '\n'
      << "monitor.window=" << config.monitor.window << '\n'
      << "monitor.warn_threshold=" << config.monitor.warn_threshold << '\n'
      << "monitor.drift_threshold=" << real_text(config.monitor.drift_threshold) << '\n'
      << "trace_window=" << config.trace_window << '\n'
      << "rank_diagnostics=" << (config.rank_diagnostics ? "on" : "off") << '\n'
      << "gain_fit=" << (config.gain_fit ? "on" : "off") << '\n'
      << "calibration_size=" << config.calibration_size << '\n';
  return out.str();
}

void validate(const ExperimentConfig& config) {
  auto fail = [](const std::string& why) { throw ConfigError("config: " + why); };
  if (config.L0 < 1) fail("L0 must be at least 1");
  if (config.delta_L < 0) fail("delta_L must be non-negative");
  if ((config.learner == Learner::AOSELM2 || config.learner == Learner::CEOSELM) &&
      config.delta_L < 1) {
    fail(std::string(to_string(config.learner)) + " requires delta_L >= 1");
  }
  if (!(config.c > 0.0)) fail("c must be positive");
  if (config.batch_size < 1) fail("batch_size must be at least 1");
  if (config.seeds.empty()) fail("at least one seed is required");
  if (config.eval == EvalProtocol::KFold && config.folds < 2) fail("folds must be at least 2");
  if (config.eval == EvalProtocol::Holdout &&
      (config.trials < 1 || !(config.test_fraction > 0.0 && config.test_fraction < 1.0))) {
    fail("holdout needs trials >= 1 and test_fraction in (0, 1)");
  }
  if (config.samples_per_concept < 2) fail("samples_per_concept must be at least 2");
  if (!(config.sea_noise >= 0.0 && config.sea_noise <= 0.5)) fail("sea_noise must lie in [0, 0.5]");
  if (config.mnist_limit < 0) fail("mnist_limit must be non-negative");
  if (config.trace_window < 1) fail("trace_window must be at least 1");
  if (config.calibration_size < 1) fail("calibration_size must be at least 1");
  (void)DriftMonitor(config.monitor);

  std::set<std::string> names;
  for (const auto& def : config.concepts) {
    if (!names.insert(def.name).second) fail("duplicate concept '" + def.name + "'");
  }
  if (config.schedule.empty()) fail("schedule is empty");
  const auto schedule = parse_schedule(config.schedule);
  for (const auto& seg : schedule) {
    std::set<std::string> in_segment;
    for (const auto& item : seg.items) {
      if (!names.contains(item.concept_name)) fail("schedule names unknown concept '" + item.concept_name + "'");
      if (!in_segment.insert(item.concept_name).second) {
        fail("concept '" + item.concept_name + "' appears twice in one segment");
      }
    }
  }
}

}  // namespace aoselm

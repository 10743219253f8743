#include "aoselm/serialize.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <zlib.h>

#include "aoselm/errors.hpp"

namespace aoselm {

namespace {

constexpr char kMagic[8] = {'A', 'O', 'S', 'E', 'L', 'M', '1', '\0'};
constexpr std::size_t kMagicPrefix = 6;  // "AOSELM", followed by the revision char

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw FormatError("model file: bad real '" + s + "'");
  }
  return v;
}

class Writer {
public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    out_.insert(out_.end(), c, c + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void matrix(const DenseMatrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
  std::vector<unsigned char>& data() { return out_; }

private:
  std::vector<unsigned char> out_;
};

class Reader {
public:
  explicit Reader(std::span<const unsigned char> in) : in_(in) {}

  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("model file: truncated payload");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{in_[pos_++]} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_++]} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  DenseMatrix matrix(const char* name) {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    if (rows > (1u << 30) || cols > (1u << 30) || (rows * cols) > (in_.size() - pos_) / 8) {
      throw FormatError(std::string("model file: matrix ") + name + " dimensions exceed payload");
    }
    DenseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
    return m;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

private:
  std::span<const unsigned char> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const unsigned char* p, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

long long parse_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("model file: header lacks '" + key + "'");
  long long v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("model file: bad integer for '" + key + "'");
  }
  return v;
}

const std::string& field(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("model file: header lacks '" + key + "'");
  return it->second;
}

}  // namespace

std::vector<unsigned char> model_to_bytes(const ElmModel& model) {
  model.check_invariants();
  std::ostringstream header;
  header << "scheme=" << to_string(model.scheme) << '\n'
         << "activation=" << to_string(model.activation) << '\n'
         << "c=" << hex_double(model.c) << '\n'
         << "d=" << model.d() << '\n'
         << "L=" << model.L() << '\n'
         << "m=" << model.m() << '\n'
         << "seed=" << model.seed << '\n'
         << "blocks=" << model.concepts.size() << '\n';
  for (std::size_t i = 0; i < model.concepts.size(); ++i) {
    const auto& blk = model.concepts[i];
    header << "block." << i << '=' << blk.concept_id << ',' << blk.col_start << ',' << blk.width
           << ',' << hex_double(blk.gain) << '\n';
  }
  const std::string text = header.str();

  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text.data(), text.size());
  w.matrix(model.A);
  w.matrix(model.b.transpose());
  w.matrix(model.K);
  w.matrix(model.beta);
  auto& out = w.data();
  w.u32(crc_of(out.data(), out.size()));
  return std::move(out);
}

ElmModel model_from_bytes(std::span<const unsigned char> bytes) {
  if (bytes.size() < sizeof kMagic + 8 ||
      std::memcmp(bytes.data(), kMagic, kMagicPrefix) != 0 || bytes[7] != '\0') {
    throw FormatError("model file: bad magic");
  }
  if (bytes[kMagicPrefix] != kMagic[kMagicPrefix]) {
    throw VersionError(std::string("model file: unsupported format revision '") +
                       static_cast<char>(bytes[kMagicPrefix]) + "'");
  }
  const std::size_t body = bytes.size() - 4;
  Reader tail(bytes.subspan(body));
  if (tail.u32() != crc_of(bytes.data(), body)) {
    throw ChecksumError("model file: CRC-32 mismatch");
  }

  Reader r(bytes.subspan(sizeof kMagic, body - sizeof kMagic));
  const std::uint32_t header_len = r.u32();
  const std::string text = r.text(header_len);
  std::map<std::string, std::string> kv;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("model file: malformed header line");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }

  ElmModel model;
  try {
    model.scheme = parse_init_scheme(field(kv, "scheme"));
    model.activation = parse_activation(field(kv, "activation"));
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  model.c = parse_hex_double(field(kv, "c"));
  {
    const auto& s = field(kv, "seed");
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), model.seed);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw FormatError("model file: bad integer for 'seed'");
    }
  }
  const long long blocks = parse_int(kv, "blocks");
  if (blocks < 1 || blocks > 1'000'000) throw FormatError("model file: bad block count");
  for (long long i = 0; i < blocks; ++i) {
    const std::string& spec = field(kv, "block." + std::to_string(i));
    std::istringstream parts(spec);
    std::string id, start, width, gain;
    if (!std::getline(parts, id, ',') || !std::getline(parts, start, ',') ||
        !std::getline(parts, width, ',') || !std::getline(parts, gain)) {
      throw FormatError("model file: malformed block entry");
    }
    ConceptBlock blk;
    try {
      blk.concept_id = std::stoi(id);
      blk.col_start = std::stoll(start);
      blk.width = std::stoll(width);
    } catch (const std::exception&) {
      throw FormatError("model file: malformed block entry");
    }
    blk.gain = parse_hex_double(gain);
    model.concepts.push_back(blk);
  }

  model.A = r.matrix("A");
  const DenseMatrix b = r.matrix("b");
  model.K = r.matrix("K");
  model.beta = r.matrix("beta");
  if (r.remaining() != 0) throw FormatError("model file: trailing bytes after payload");
  if (b.rows() != 1) throw FormatError("model file: bias must be a row");
  model.b = b.row(0).transpose();

  if (parse_int(kv, "d") != model.d() || parse_int(kv, "L") != model.L() ||
      parse_int(kv, "m") != model.m()) {
    throw FormatError("model file: header dimensions disagree with payload");
  }
  try {
    model.check_invariants();
  } catch (const DimensionError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  return model;
}

void save_model(const ElmModel& model, const std::filesystem::path& path) {
  const auto bytes = model_to_bytes(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

ElmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  const std::vector<unsigned char> bytes(std::istreambuf_iterator<char>(in), {});
  return model_from_bytes(bytes);
}

}  // namespace aoselm

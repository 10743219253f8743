#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "aoselm/drift.hpp"
#include "aoselm/errors.hpp"
#include "aoselm/serialize.hpp"
#include "aoselm/sequential.hpp"
#include "oracles.hpp"

using namespace aoselm;

namespace {

// Bitwise reflected CRC-32 (polynomial 0xEDB88320).
std::uint32_t crc32_bitwise(const unsigned char* p, std::size_t n) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) {
    crc ^= p[i];
    for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

void reseal(std::vector<unsigned char>& bytes) {
  const std::uint32_t crc = crc32_bitwise(bytes.data(), bytes.size() - 4);
  for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = static_cast<unsigned char>(crc >> (8 * i));
}

ElmModel sample_model(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  RngStream rng(seed);
  ElmModel m = init_model(4, 7, 3, seed % 2 ? InitScheme::Norm : InitScheme::Ros, 0.3 + seed, rng,
                          seed % 3 ? Activation::Sigmoid : Activation::Tanh);
  oselm_update(m, LabeledBatch{oracle::uniform(gen, 4, 20), oracle::uniform(gen, 20, 3)});
  adapt_real(m, 2, true);
  set_concept_gain(m, 1, 1.0 / 3.0);
  return m;
}

}  // namespace

TEST_CASE("byte round trip is bitwise") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ElmModel m = sample_model(seed);
    const auto bytes = model_to_bytes(m);
    const ElmModel back = model_from_bytes(bytes);
    CHECK(back.A == m.A);
    CHECK(back.b == m.b);
    CHECK(back.K == m.K);
    CHECK(back.beta == m.beta);
    CHECK(back.c == m.c);
    CHECK(back.scheme == m.scheme);
    CHECK(back.activation == m.activation);
    CHECK(back.concepts == m.concepts);
    CHECK(back.seed == m.seed);
    CHECK(model_to_bytes(back) == bytes);
  }
}

TEST_CASE("layout and checksum") {
  const auto bytes = model_to_bytes(sample_model(2));
  CHECK(std::memcmp(bytes.data(), "AOSELM1\0", 8) == 0);
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= std::uint32_t{bytes[bytes.size() - 4 + i]} << (8 * i);
  CHECK(stored == crc32_bitwise(bytes.data(), bytes.size() - 4));
}

TEST_CASE("file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "aoselm_model_test.bin";
  const ElmModel m = sample_model(3);
  save_model(m, path);
  const ElmModel back = load_model(path);
  std::mt19937_64 gen(1);
  const DenseMatrix X = oracle::uniform(gen, 4, 9);
  CHECK(predict_scores(back, X) == predict_scores(m, X));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), FormatError);
}

TEST_CASE("corruption is detected") {
  const auto bytes = model_to_bytes(sample_model(4));
  for (std::size_t pos : {std::size_t{20}, bytes.size() / 2, bytes.size() - 10}) {
    auto bad = bytes;
    bad[pos] ^= 0x01;
    CHECK_THROWS_AS(model_from_bytes(bad), ChecksumError);
  }
  auto version = bytes;
  version[6] = '9';
  CHECK_THROWS_AS(model_from_bytes(version), VersionError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(model_from_bytes(magic), FormatError);
  CHECK_THROWS_AS(model_from_bytes(std::span<const unsigned char>(bytes.data(), 5)), FormatError);
}

TEST_CASE("sealed but malformed payloads are format errors") {
  auto bytes = model_to_bytes(sample_model(5));
  // Header text starts after magic and length; break its first '='.
  for (std::size_t i = 12; i < bytes.size(); ++i) {
    if (bytes[i] == '=') {
      bytes[i] = ':';
      break;
    }
  }
  reseal(bytes);
  CHECK_THROWS_AS(model_from_bytes(bytes), FormatError);

  auto trunc = model_to_bytes(sample_model(5));
  trunc.erase(trunc.end() - 12, trunc.end() - 4);
  reseal(trunc);
  CHECK_THROWS_AS(model_from_bytes(trunc), FormatError);
}

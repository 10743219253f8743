#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "aoselm/model.hpp"

namespace aoselm {

/// Model file layout:
///   "AOSELM1\0"
///   u32 header length, header text of key=value lines (scheme, activation, c,
///     d, L, m, seed, blocks, block.<i>=id,col_start,width,gain); reals as C99
///     hex floats so they round-trip exactly
///   A, b, K, beta: each u64 rows, u64 cols, rows*cols f64 in row-major order
///   u32 CRC-32 of every preceding byte
/// All integers and floats are little-endian.
std::vector<unsigned char> model_to_bytes(const ElmModel& model);

/// Throws VersionError for an unknown format revision, ChecksumError when the
/// CRC does not match and FormatError for any other malformed payload.
ElmModel model_from_bytes(std::span<const unsigned char> bytes);

void save_model(const ElmModel& model, const std::filesystem::path& path);
ElmModel load_model(const std::filesystem::path& path);

}  // namespace aoselm

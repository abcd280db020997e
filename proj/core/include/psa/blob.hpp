#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "psa/grid.hpp"

namespace psa::blob {

// On-disk grid blob: 16-byte header (magic "PSAG", u16 version, u16 dtype,
// u32 height, u32 width, all little-endian) followed by height*width values,
// row-major, little-endian. dtype 1 = IEEE-754 binary32 (datasets, masks as
// 0.0/1.0), dtype 2 = binary64 (model parameter blobs).
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::uint16_t kDtypeF32 = 1;
inline constexpr std::uint16_t kDtypeF64 = 2;

/// CRC-32 (IEEE), optionally chained via `crc` for incremental hashing.
std::uint32_t crc32(const void* data, std::size_t n, std::uint32_t crc = 0);

std::vector<std::uint8_t> encode_grid(const Grid& g);
Grid decode_grid(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_f64(const std::vector<double>& values);
std::vector<double> decode_f64(const std::vector<std::uint8_t>& bytes);

/// Writes the encoded blob; returns the CRC-32 of the bytes written.
std::uint32_t write_grid(const std::filesystem::path& file, const Grid& g);
std::uint32_t write_f64(const std::filesystem::path& file, const std::vector<double>& values);

/// Reads and decodes a blob. The two-argument forms verify the stored bytes
/// against `expected_crc` first. Throws std::runtime_error on truncation,
/// bad magic, or checksum mismatch.
Grid read_grid(const std::filesystem::path& file);
Grid read_grid(const std::filesystem::path& file, std::uint32_t expected_crc);
std::vector<double> read_f64(const std::filesystem::path& file);
std::vector<double> read_f64(const std::filesystem::path& file, std::uint32_t expected_crc);

std::vector<std::uint8_t> read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, const std::vector<std::uint8_t>& bytes);

}  // namespace psa::blob

/* Copyright 2026 The arbires Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

// GRD1: a self-describing container for one dense array.
//
//   magic   "GRD1"
//   u16     version (1)
//   u8      dtype (0 = float32, 1 = float64)
//   u8      ndim
//   u64     dims[ndim]
//   u32     name count, then per name: u32 byte length + UTF-8 bytes
//   payload prod(dims) values, row-major, little-endian
//
// Several records may be concatenated in one file (checkpoints do this).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace arbires::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

inline constexpr std::uint16_t kGrd1Version = 1;

struct Grd1Record {
  DType dtype = DType::F64;
  std::vector<std::uint64_t> dims;
  /// Channel names, or any other labels the producer wants to attach.
  std::vector<std::string> names;
  /// Values widened to double; float32 payloads round-trip exactly.
  std::vector<double> data;

  std::uint64_t count() const;
};

void write_grd1(std::ostream& out, const Grd1Record& rec);
/// Reads one record; throws FormatError on bad magic, unknown version or a
/// short payload.
Grd1Record read_grd1(std::istream& in);

/// Writes to a sibling temporary file and renames it into place.
void write_grd1_file(const std::filesystem::path& path, const Grd1Record& rec);
void write_grd1_file(const std::filesystem::path& path, const std::vector<Grd1Record>& recs);
/// Reads a file holding exactly one record.
Grd1Record read_grd1_file(const std::filesystem::path& path);
std::vector<Grd1Record> read_grd1_all(const std::filesystem::path& path);

/// CRC-32 of a file's bytes.
std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace arbires::io

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

#include "arbires/io/grd1.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace arbires::io {

namespace {

template <class T>
void put(std::ostream& out, T v) {
  std::array<char, sizeof(T)> b;
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

template <class T>
T get(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) throw FormatError(std::string("GRD1: truncated ") + what);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

constexpr std::size_t kChunk = 1 << 14;

}  // namespace

std::uint64_t Grd1Record::count() const {
  std::uint64_t n = 1;
  for (std::uint64_t d : dims) n *= d;
  return n;
}

void write_grd1(std::ostream& out, const Grd1Record& rec) {
  if (rec.dims.size() > 255) throw FormatError("GRD1: at most 255 dims");
  if (rec.count() != rec.data.size()) {
    throw FormatError("GRD1: payload holds " + std::to_string(rec.data.size()) + " values but dims give " +
                      std::to_string(rec.count()));
  }
  out.write("GRD1", 4);
  put<std::uint16_t>(out, kGrd1Version);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(rec.dtype));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(rec.dims.size()));
  for (std::uint64_t d : rec.dims) put<std::uint64_t>(out, d);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.names.size()));
  for (const std::string& s : rec.names) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  std::vector<unsigned char> buf;
  const std::size_t width = rec.dtype == DType::F32 ? 4 : 8;
  for (std::size_t base = 0; base < rec.data.size(); base += kChunk) {
    const std::size_t n = std::min(kChunk, rec.data.size() - base);
    buf.resize(n * width);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t bits = rec.dtype == DType::F32 ? std::bit_cast<std::uint32_t>(static_cast<float>(rec.data[base + i]))
                                                   : std::bit_cast<std::uint64_t>(rec.data[base + i]);
      for (std::size_t k = 0; k < width; ++k) buf[i * width + k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw FormatError("GRD1: write failed");
}

Grd1Record read_grd1(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GRD1", 4) != 0) throw FormatError("GRD1: bad magic");
  const auto version = get<std::uint16_t>(in, "version");
  if (version != kGrd1Version) throw FormatError("GRD1: unsupported version " + std::to_string(version));
  Grd1Record rec;
  const auto dtype = get<std::uint8_t>(in, "dtype");
  if (dtype > 1) throw FormatError("GRD1: unknown dtype code " + std::to_string(dtype));
  rec.dtype = static_cast<DType>(dtype);
  const auto ndim = get<std::uint8_t>(in, "ndim");
  for (std::size_t a = 0; a < ndim; ++a) rec.dims.push_back(get<std::uint64_t>(in, "dims"));
  const auto names = get<std::uint32_t>(in, "name table");
  for (std::uint32_t k = 0; k < names; ++k) {
    const auto len = get<std::uint32_t>(in, "name length");
    std::string s(len, '\0');
    if (len && !in.read(s.data(), len)) throw FormatError("GRD1: truncated name table");
    rec.names.push_back(std::move(s));
  }
  const std::uint64_t n = rec.count();
  const std::size_t width = rec.dtype == DType::F32 ? 4 : 8;
  rec.data.resize(n);
  std::vector<unsigned char> buf;
  for (std::uint64_t base = 0; base < n; base += kChunk) {
    const std::size_t m = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, n - base));
    buf.resize(m * width);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
      throw FormatError("GRD1: payload shorter than dims require (" + std::to_string(n) + " values)");
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::uint64_t bits = 0;
      for (std::size_t k = 0; k < width; ++k) bits |= static_cast<std::uint64_t>(buf[i * width + k]) << (8 * k);
      rec.data[base + i] = width == 4 ? static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(bits)))
                                      : std::bit_cast<double>(bits);
    }
  }
  return rec;
}

void write_grd1_file(const std::filesystem::path& path, const std::vector<Grd1Record>& recs) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    for (const Grd1Record& r : recs) write_grd1(out, r);
    out.flush();
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_grd1_file(const std::filesystem::path& path, const Grd1Record& rec) {
  write_grd1_file(path, std::vector<Grd1Record>{rec});
}

std::vector<Grd1Record> read_grd1_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<Grd1Record> out;
  while (in.peek() != std::char_traits<char>::eof()) out.push_back(read_grd1(in));
  if (out.empty()) throw FormatError(path.string() + " holds no GRD1 record");
  return out;
}

Grd1Record read_grd1_file(const std::filesystem::path& path) {
  auto recs = read_grd1_all(path);
  if (recs.size() != 1) throw FormatError(path.string() + " holds " + std::to_string(recs.size()) + " records, expected 1");
  return std::move(recs.front());
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> buf(1 << 16);
  while (in.read(buf.data(), static_cast<std::streamsize>(buf.size())) || in.gcount() > 0) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(in.gcount()));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace arbires::io

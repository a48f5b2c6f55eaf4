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

#include "arbires/io/manifest.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "arbires/io/grd1.hpp"

namespace arbires::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += f(xs[i]);
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw FormatError("manifest: '" + key + "' expects an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw FormatError("manifest: '" + key + "' expects a number, got '" + v + "'");
  }
}

}  // namespace

std::vector<std::string> DatasetManifest::ids(const std::string& split) const {
  std::vector<std::string> out;
  for (const auto& r : records)
    if (r.split == split) out.push_back(r.id);
  return out;
}

bool DatasetManifest::has_resolution(std::size_t res) const {
  return std::find(ladder.begin(), ladder.end(), res) != ladder.end();
}

std::string DatasetManifest::config_value(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : config)
    if (k == key) return v;
  return fallback;
}

void DatasetManifest::validate() const {
  if (ladder.empty()) throw FormatError("manifest: empty resolution ladder");
  for (std::size_t r : ladder)
    if (r == 0 || ladder.front() % r != 0) {
      throw FormatError("manifest: ladder member " + std::to_string(r) + " is not a pool factor of " +
                        std::to_string(ladder.front()));
    }
  if (channels.empty()) throw FormatError("manifest: no channels");
  if (norm.channels() != channels.size()) throw FormatError("manifest: normalization does not cover every channel");
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) throw FormatError("manifest: record '" + r.id + "' listed twice");
    if (r.split != "train" && r.split != "val" && r.split != "test") {
      throw FormatError("manifest: record '" + r.id + "' has unknown split '" + r.split + "'");
    }
  }
}

std::filesystem::path record_path(const std::filesystem::path& root, const std::string& id, std::size_t resolution) {
  return root / (id + "_r" + std::to_string(resolution) + ".grd1");
}

void write_manifest(const std::filesystem::path& root, const DatasetManifest& m) {
  m.validate();
  std::filesystem::create_directories(root);
  std::ostringstream out;
  out << "# arbires dataset manifest\n";
  out << "format = 1\n";
  out << "dataset_id = " << m.dataset_id << "\n";
  out << "source = " << m.source << "\n";
  out << "channels = " << join(m.channels, [](const std::string& s) { return s; }) << "\n";
  out << "ladder = " << join(m.ladder, [](std::size_t v) { return std::to_string(v); }) << "\n";
  out << "boundary = " << grid::boundary_name(m.boundary) << "\n";
  out << "frames = " << m.frames << "\n";
  out << "window_in = " << m.window_in << "\n";
  out << "window_out = " << m.window_out << "\n";
  out << "norm.mean = " << join(m.norm.mean, fmt) << "\n";
  out << "norm.std = " << join(m.norm.std, fmt) << "\n";
  for (const auto& [k, v] : m.config) out << "config." << k << " = " << v << "\n";
  out << "dropped = " << join(m.dropped, [](const std::string& s) { return s; }) << "\n";
  out << "checksum = " << m.checksum << "\n";
  out << "[records]\n";
  for (const auto& r : m.records) out << r.id << " " << r.split << "\n";
  const std::filesystem::path path = root / "manifest.txt";
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw FormatError("cannot write " + tmp.string());
    f << out.str();
    if (!f.flush()) throw FormatError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

DatasetManifest read_manifest(const std::filesystem::path& root) {
  const std::filesystem::path path = root / "manifest.txt";
  std::ifstream in(path);
  if (!in) throw FormatError("no dataset manifest at " + path.string());
  DatasetManifest m;
  std::string line;
  bool records = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[records]") {
      records = true;
      continue;
    }
    if (records) {
      std::istringstream ss(line);
      ManifestRecord r;
      if (!(ss >> r.id >> r.split)) throw FormatError("manifest line " + std::to_string(lineno) + ": bad record row");
      m.records.push_back(r);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("manifest line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "format") {
      if (value != "1") throw FormatError("manifest: unsupported format " + value);
    } else if (key == "dataset_id") {
      m.dataset_id = value;
    } else if (key == "source") {
      m.source = value;
    } else if (key == "channels") {
      m.channels = split_list(value);
    } else if (key == "ladder") {
      for (const auto& s : split_list(value)) m.ladder.push_back(to_size(key, s));
    } else if (key == "boundary") {
      m.boundary = grid::parse_boundary(value);
    } else if (key == "frames") {
      m.frames = to_size(key, value);
    } else if (key == "window_in") {
      m.window_in = to_size(key, value);
    } else if (key == "window_out") {
      m.window_out = to_size(key, value);
    } else if (key == "norm.mean") {
      for (const auto& s : split_list(value)) m.norm.mean.push_back(to_double(key, s));
    } else if (key == "norm.std") {
      for (const auto& s : split_list(value)) m.norm.std.push_back(to_double(key, s));
    } else if (key.rfind("config.", 0) == 0) {
      m.config.emplace_back(key.substr(7), value);
    } else if (key == "dropped") {
      m.dropped = split_list(value);
    } else if (key == "checksum") {
      m.checksum = value;
    } else {
      throw FormatError("manifest: unknown key '" + key + "'");
    }
  }
  m.validate();
  return m;
}

std::string dataset_checksum(const std::filesystem::path& root, const DatasetManifest& m) {
  uLong crc = crc32(0L, Z_NULL, 0);
  auto feed = [&](const std::string& s) { crc = crc32(crc, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())); };
  for (const auto& r : m.records) {
    feed(r.id + " " + r.split + "\n");
    for (std::size_t res : m.ladder) {
      const std::uint32_t c = file_crc32(record_path(root, r.id, res));
      feed(std::to_string(res) + ":" + std::to_string(c) + "\n");
    }
  }
  feed(join(m.norm.mean, fmt) + ";" + join(m.norm.std, fmt));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

std::vector<std::string> assign_splits(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  const double total = ratios.train + ratios.val + ratios.test;
  if (!(ratios.train >= 0 && ratios.val >= 0 && ratios.test >= 0 && total > 0)) {
    throw std::invalid_argument("split ratios must be non-negative with a positive sum");
  }
  std::size_t n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.val / total));
  std::size_t n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.test / total));
  if (n >= 3) {
    n_val = std::max<std::size_t>(n_val, ratios.val > 0 ? 1 : 0);
    n_test = std::max<std::size_t>(n_test, ratios.test > 0 ? 1 : 0);
  }
  while (n_val + n_test > n) (n_val > n_test ? n_val : n_test) -= 1;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::string> out(n, "train");
  for (std::size_t k = 0; k < n_val; ++k) out[order[k]] = "val";
  for (std::size_t k = n_val; k < n_val + n_test; ++k) out[order[k]] = "test";
  return out;
}

}  // namespace arbires::io

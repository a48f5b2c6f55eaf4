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

// Dataset manifest: a plain-text file `manifest.txt` at the dataset root.
// Header lines are `key = value`; the `[records]` section lists one
// `id split` pair per line. Record arrays live next to it as
// `<id>_r<resolution>.grd1`, each shaped [C, T, H, W].

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "arbires/grid/resample.hpp"
#include "arbires/train/norm.hpp"

namespace arbires::io {

struct ManifestRecord {
  std::string id;
  std::string split;  // train | val | test
};

struct DatasetManifest {
  std::string dataset_id;
  std::string source;  // ns-sim | external-grid
  std::vector<std::string> channels;
  /// Base resolution first, then its pooled versions.
  std::vector<std::size_t> ladder;
  grid::Boundary boundary = grid::Boundary::Periodic;
  std::size_t frames = 1;
  std::size_t window_in = 0;
  std::size_t window_out = 0;
  train::NormStats norm;
  /// Generator settings echoed for reproducibility.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> dropped;
  std::vector<ManifestRecord> records;
  std::string checksum;

  std::vector<std::string> ids(const std::string& split) const;
  bool has_resolution(std::size_t res) const;
  std::string config_value(const std::string& key, const std::string& fallback = "") const;
  /// Partition and ladder consistency; throws FormatError.
  void validate() const;
};

std::filesystem::path record_path(const std::filesystem::path& root, const std::string& id, std::size_t resolution);

void write_manifest(const std::filesystem::path& root, const DatasetManifest& m);
DatasetManifest read_manifest(const std::filesystem::path& root);

/// CRC over the split table and every record file, in manifest order.
std::string dataset_checksum(const std::filesystem::path& root, const DatasetManifest& m);

struct SplitRatios {
  double train = 0.7;
  double val = 0.2;
  double test = 0.1;
};

/// Split labels for n items after a seeded shuffle. Counts are rounded from
/// the ratios; with n >= 3 every split gets at least one item.
std::vector<std::string> assign_splits(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace arbires::io

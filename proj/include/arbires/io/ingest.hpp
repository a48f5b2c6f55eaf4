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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arbires/io/grd1.hpp"
#include "arbires/io/manifest.hpp"

namespace arbires::io {

/// Patch tiling of a source grid. Region bounds are half-open source
/// indices; a zero end means "to the edge".
struct PatchSpec {
  std::size_t size = 128;
  /// 0 means stride = size (non-overlapping).
  std::size_t stride = 0;
  std::size_t row_begin = 0, row_end = 0;
  std::size_t col_begin = 0, col_end = 0;
};

struct IngestOptions {
  PatchSpec patch;
  std::vector<std::size_t> factors{2, 4, 8};
  SplitRatios splits;
  std::uint64_t seed = 0;
  std::string dataset_id = "grid";
  /// Expected channel names; empty accepts whatever the source declares.
  std::vector<std::string> channels;
  grid::Boundary boundary = grid::Boundary::Replicate;
};

/// Top-left corners of every patch inside the region, row-major.
std::vector<std::pair<std::size_t, std::size_t>> patch_origins(std::size_t height, std::size_t width,
                                                               const PatchSpec& spec);

/// Tiles a [C, H, W] (or [C, 1, H, W]) source into patches, writes each at
/// its base size and every pooled size, assigns seeded splits and writes the
/// manifest. Patches containing non-finite cells are dropped and listed.
DatasetManifest ingest_grid(const Grd1Record& source, const IngestOptions& options, const std::filesystem::path& out);

/// Synthetic stand-in for a gridded surface current product: a periodic,
/// divergence-free (uo, vo) pair derived from a random stream function with
/// a power-law spectrum, optionally with circular NaN "land" islands.
struct SynthOptions {
  std::size_t height = 1280;
  std::size_t width = 1280;
  /// Stream-function amplitude falls as |k|^-slope beyond the rolloff.
  double slope = 3.0;
  /// Rolloff wavenumber in cycles per domain.
  double rolloff = 24.0;
  /// RMS speed of the result.
  double rms_speed = 0.2;
  std::size_t islands = 0;
  std::uint64_t seed = 0;
};

Grd1Record synth_grid(const SynthOptions& options);

}  // namespace arbires::io

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
#include <functional>
#include <vector>

#include "arbires/io/manifest.hpp"
#include "arbires/ns/grf.hpp"
#include "arbires/ns/solver.hpp"

namespace arbires::ns {

struct GenerateOptions {
  std::size_t n_sims = 10;
  /// Pooled copies stored next to the base resolution (cfg.resolution).
  std::vector<std::size_t> pooled = {32, 16};
  std::size_t window_in = 5;
  std::size_t window_out = 5;
  io::SplitRatios splits;
  std::string dataset_id = "ns";
  /// Called after every simulation with (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Number of overlapping windows of `window` consecutive frames.
std::size_t windows_per_simulation(std::size_t frames, std::size_t window);

/// Simulation i starts from sample_grf(grf, resolution, cfg.seed + i). Each
/// kept simulation stores its recorded frames at every ladder resolution as
/// `sim_<i>_r<res>.grd1` ([1, T, r, r]). Blown-up trajectories are dropped
/// and their seeds listed in the manifest.
io::DatasetManifest generate_dataset(const NSConfig& cfg, const GRFConfig& grf, const GenerateOptions& opts,
                                     const std::filesystem::path& out);

}  // namespace arbires::ns

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

#include "arbires/ns/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>

#include "arbires/grid/resample.hpp"
#include "arbires/io/grd1.hpp"

namespace arbires::ns {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sim_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sim_%05zu", i);
  return buf;
}

}  // namespace

std::size_t windows_per_simulation(std::size_t frames, std::size_t window) {
  return frames >= window ? frames - window + 1 : 0;
}

io::DatasetManifest generate_dataset(const NSConfig& cfg, const GRFConfig& grf, const GenerateOptions& opts,
                                     const std::filesystem::path& out) {
  validate(cfg);
  validate(grf);
  if (opts.n_sims < 1) throw std::invalid_argument("n_sims must be >= 1");
  const std::size_t base = cfg.resolution;
  std::vector<std::size_t> ladder{base};
  for (std::size_t r : opts.pooled) {
    if (r == 0 || r >= base || base % r != 0) {
      throw std::invalid_argument("pooled resolution " + std::to_string(r) + " is not a pool factor of " +
                                  std::to_string(base));
    }
    ladder.push_back(r);
  }
  if (cfg.record_steps < opts.window_in + opts.window_out) {
    throw std::invalid_argument("record_steps shorter than one input/target window");
  }
  std::filesystem::create_directories(out);

  const VorticitySolver solver(cfg);
  io::DatasetManifest m;
  m.dataset_id = opts.dataset_id;
  m.source = "ns-sim";
  m.channels = {"vorticity"};
  m.ladder = ladder;
  m.boundary = grid::Boundary::Periodic;
  m.frames = cfg.record_steps;
  m.window_in = opts.window_in;
  m.window_out = opts.window_out;

  std::vector<std::string> kept;
  for (std::size_t s = 0; s < opts.n_sims; ++s) {
    const std::uint64_t seed = cfg.seed + s;
    std::vector<grid::Field> frames;
    try {
      frames = solver.run(sample_grf(grf, base, seed));
    } catch (const BlowUpError& e) {
      std::cerr << "simulation " << s << " (seed " << seed << ") dropped: " << e.what() << "\n";
      m.dropped.push_back(std::to_string(seed));
      if (opts.progress) opts.progress(s + 1, opts.n_sims);
      continue;
    }
    const std::string id = sim_id(s);
    for (std::size_t r : ladder) {
      io::Grd1Record rec;
      rec.dims = {1, frames.size(), r, r};
      rec.names = {"vorticity"};
      rec.data.reserve(frames.size() * r * r);
      for (const grid::Field& f : frames) {
        const grid::Field g = r == base ? f : grid::average_pool(f, base / r);
        rec.data.insert(rec.data.end(), g.data().begin(), g.data().end());
      }
      io::write_grd1_file(io::record_path(out, id, r), rec);
    }
    kept.push_back(id);
    if (opts.progress) opts.progress(s + 1, opts.n_sims);
  }
  if (kept.empty()) throw BlowUpError("every simulation blew up");

  const std::vector<std::string> split = io::assign_splits(kept.size(), opts.splits, cfg.seed);
  train::NormAccumulator acc(1);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    m.records.push_back({kept[k], split[k]});
    if (split[k] == "train") acc.add(0, io::read_grd1_file(io::record_path(out, kept[k], base)).data);
  }
  if (std::none_of(split.begin(), split.end(), [](const std::string& s) { return s == "train"; })) {
    throw std::invalid_argument("training split is empty");
  }
  m.norm = acc.finish();
  m.config = {{"generator", "ns-sim"},
              {"viscosity", num(cfg.viscosity)},
              {"forcing_amplitude", num(cfg.forcing_amplitude)},
              {"resolution", std::to_string(cfg.resolution)},
              {"record_steps", std::to_string(cfg.record_steps)},
              {"record_interval", num(cfg.record_interval)},
              {"max_dt", num(cfg.max_dt)},
              {"cfl_safety", num(cfg.cfl_safety)},
              {"seed", std::to_string(cfg.seed)},
              {"n_sims", std::to_string(opts.n_sims)},
              {"grf.alpha", num(grf.alpha)},
              {"grf.tau", num(grf.tau)},
              {"grf.sigma", num(grf.sigma)},
              {"split.train", num(opts.splits.train)},
              {"split.val", num(opts.splits.val)},
              {"split.test", num(opts.splits.test)}};
  m.checksum = io::dataset_checksum(out, m);
  io::write_manifest(out, m);
  return m;
}

}  // namespace arbires::ns

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

#include "arbires/io/ingest.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "arbires/grid/fft.hpp"

namespace arbires::io {

std::vector<std::pair<std::size_t, std::size_t>> patch_origins(std::size_t height, std::size_t width,
                                                               const PatchSpec& spec) {
  if (spec.size == 0) throw FormatError("patch size must be positive");
  const std::size_t stride = spec.stride == 0 ? spec.size : spec.stride;
  const std::size_t r1 = spec.row_end == 0 ? height : std::min(spec.row_end, height);
  const std::size_t c1 = spec.col_end == 0 ? width : std::min(spec.col_end, width);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = spec.row_begin; r + spec.size <= r1; r += stride)
    for (std::size_t c = spec.col_begin; c + spec.size <= c1; c += stride) out.emplace_back(r, c);
  return out;
}

DatasetManifest ingest_grid(const Grd1Record& source, const IngestOptions& options, const std::filesystem::path& out) {
  const auto& d = source.dims;
  const bool framed = d.size() == 4 && d[1] == 1;
  if (d.size() != 3 && !framed)
    throw FormatError("ingest: source must be [C, H, W] or [C, 1, H, W], got " + std::to_string(d.size()) + " dims");
  const std::size_t channels = d[0], height = d[d.size() - 2], width = d[d.size() - 1];
  std::vector<std::string> names = source.names;
  if (names.size() != channels) throw FormatError("ingest: source declares " + std::to_string(names.size()) +
                                                  " channel names for " + std::to_string(channels) + " channels");
  if (!options.channels.empty() && options.channels != names) {
    std::string got;
    for (const auto& n : names) got += (got.empty() ? "" : ",") + n;
    throw FormatError("ingest: source channels (" + got + ") differ from the expected set");
  }
  const std::size_t p = options.patch.size;
  for (std::size_t f : options.factors)
    if (f == 0 || p % f != 0)
      throw FormatError("ingest: patch size " + std::to_string(p) + " is not divisible by factor " + std::to_string(f));
  const auto origins = patch_origins(height, width, options.patch);
  if (origins.empty())
    throw FormatError("ingest: a " + std::to_string(height) + "x" + std::to_string(width) +
                      " source holds no " + std::to_string(p) + "x" + std::to_string(p) + " patch");

  DatasetManifest m;
  m.dataset_id = options.dataset_id;
  m.source = "external-grid";
  m.channels = names;
  m.ladder = {p};
  for (std::size_t f : options.factors) m.ladder.push_back(p / f);
  m.boundary = options.boundary;
  m.frames = 1;
  std::filesystem::create_directories(out);

  std::vector<std::string> kept;
  std::vector<std::vector<double>> patches;
  for (const auto& [r0, c0] : origins) {
    std::vector<double> patch(channels * p * p);
    bool finite = true;
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          const double v = source.data[(c * height + r0 + i) * width + c0 + j];
          finite = finite && std::isfinite(v);
          patch[(c * p + i) * p + j] = v;
        }
    if (!finite) {
      m.dropped.push_back("r" + std::to_string(r0) + "c" + std::to_string(c0));
      continue;
    }
    char id[32];
    std::snprintf(id, sizeof id, "patch_%05zu", kept.size());
    kept.emplace_back(id);
    patches.push_back(std::move(patch));
  }
  if (kept.empty()) throw FormatError("ingest: every patch contains non-finite cells");

  const std::vector<std::string> splits = assign_splits(kept.size(), options.splits, options.seed);
  train::NormAccumulator acc(channels);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    grid::Field base(channels, p, p, patches[k]);
    for (std::size_t res : m.ladder) {
      const grid::Field f = res == p ? base : grid::average_pool(base, p / res);
      Grd1Record rec;
      rec.dims = {channels, 1, res, res};
      rec.names = names;
      rec.data = f.data();
      write_grd1_file(record_path(out, kept[k], res), rec);
    }
    if (splits[k] == "train")
      for (std::size_t c = 0; c < channels; ++c)
        acc.add(c, std::span<const double>(patches[k].data() + c * p * p, p * p));
    m.records.push_back({kept[k], splits[k]});
  }
  m.norm = acc.finish();
  m.config = {{"patch", std::to_string(p)},
              {"stride", std::to_string(options.patch.stride == 0 ? p : options.patch.stride)},
              {"seed", std::to_string(options.seed)},
              {"split_ratios", std::to_string(options.splits.train) + "/" + std::to_string(options.splits.val) + "/" +
                                   std::to_string(options.splits.test)},
              {"source_dims", std::to_string(height) + "x" + std::to_string(width)}};
  m.validate();
  m.checksum = dataset_checksum(out, m);
  write_manifest(out, m);
  return m;
}

Grd1Record synth_grid(const SynthOptions& o) {
  if (o.height < 16 || o.width < 16) throw FormatError("synth: grid must be at least 16x16");
  const std::size_t h = o.height, w = o.width;
  grid::Field noise(1, h, w);
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal;
  for (double& v : noise.data()) v = normal(rng);
  grid::Spectrum psi = grid::fft2(noise);
  grid::Spectrum u = psi, v = psi;
  const double two_pi = 2 * std::numbers::pi;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < psi.half_width(); ++j) {
      const double ky = static_cast<double>(psi.ky(i)), kx = static_cast<double>(psi.kx(j));
      const double amp = std::pow(kx * kx + ky * ky + o.rolloff * o.rolloff, -o.slope / 2);
      const grid::cplx s = psi.at(0, i, j) * amp;
      // u = d psi / dy, v = -d psi / dx; odd derivatives vanish on Nyquist bins.
      const bool nyq_y = h % 2 == 0 && i == h / 2, nyq_x = w % 2 == 0 && j == w / 2;
      u.at(0, i, j) = nyq_y ? 0.0 : grid::cplx(0.0, two_pi * ky) * s;
      v.at(0, i, j) = nyq_x ? 0.0 : -grid::cplx(0.0, two_pi * kx) * s;
    }
  grid::Field uf = grid::ifft2(u, h, w), vf = grid::ifft2(v, h, w);
  double ms = 0.0;
  for (std::size_t k = 0; k < h * w; ++k) ms += uf.data()[k] * uf.data()[k] + vf.data()[k] * vf.data()[k];
  const double gain = o.rms_speed / std::sqrt(ms / static_cast<double>(h * w));
  Grd1Record rec;
  rec.dims = {2, h, w};
  rec.names = {"uo", "vo"};
  rec.data.resize(2 * h * w);
  for (std::size_t k = 0; k < h * w; ++k) {
    rec.data[k] = gain * uf.data()[k];
    rec.data[h * w + k] = gain * vf.data()[k];
  }
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t s = 0; s < o.islands; ++s) {
    const double cy = uni(rng) * h, cx = uni(rng) * w, r = 3.0 + uni(rng) * 12.0;
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j)
        if ((i - cy) * (i - cy) + (j - cx) * (j - cx) <= r * r)
          rec.data[i * w + j] = rec.data[h * w + i * w + j] = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace arbires::io

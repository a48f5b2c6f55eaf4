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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "arbires/io/grd1.hpp"
#include "arbires/io/ingest.hpp"
#include "arbires/io/plot.hpp"
#include "arbires/io/manifest.hpp"
#include "arbires/ns/solver.hpp"

using namespace arbires;
using namespace arbires::io;

namespace {

Grd1Record sample_record(DType dtype) {
  Grd1Record r;
  r.dtype = dtype;
  r.dims = {2, 3, 5};
  r.names = {"u", "v", "näme"};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 30; ++i) r.data.push_back(dtype == DType::F32 ? static_cast<float>(nd(rng)) : nd(rng));
  return r;
}

}  // namespace

TEST_CASE("GRD1 round trip is bitwise for both dtypes") {
  for (DType t : {DType::F32, DType::F64}) {
    const Grd1Record r = sample_record(t);
    std::stringstream ss;
    write_grd1(ss, r);
    const Grd1Record back = read_grd1(ss);
    CHECK(back.dtype == t);
    CHECK(back.dims == r.dims);
    CHECK(back.names == r.names);
    CHECK(std::memcmp(back.data.data(), r.data.data(), r.data.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("GRD1 header layout is little-endian as documented") {
  Grd1Record r;
  r.dims = {1};
  r.data = {1.0};
  std::stringstream ss;
  write_grd1(ss, r);
  const std::string bytes = ss.str();
  REQUIRE(bytes.size() == 4 + 2 + 1 + 1 + 8 + 4 + 8);
  CHECK(bytes.substr(0, 4) == "GRD1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);
  CHECK(bytes[7] == 1);
  CHECK(bytes[8] == 1);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 0x3f);
}

TEST_CASE("GRD1 rejects malformed input") {
  std::stringstream bad_magic("GRDX....");
  CHECK_THROWS_AS(read_grd1(bad_magic), FormatError);

  Grd1Record r = sample_record(DType::F64);
  std::stringstream ss;
  write_grd1(ss, r);
  std::string bytes = ss.str();

  std::string v2 = bytes;
  v2[4] = 2;
  std::stringstream vs(v2);
  CHECK_THROWS_WITH_AS(read_grd1(vs), doctest::Contains("version"), FormatError);

  std::stringstream shortp(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_WITH_AS(read_grd1(shortp), doctest::Contains("payload"), FormatError);

  r.data.pop_back();
  std::stringstream out;
  CHECK_THROWS_AS(write_grd1(out, r), FormatError);
}

TEST_CASE("GRD1 files hold concatenated records") {
  const auto path = std::filesystem::temp_directory_path() / "arbires_test_multi.grd1";
  write_grd1_file(path, std::vector<Grd1Record>{sample_record(DType::F64), sample_record(DType::F32)});
  const auto recs = read_grd1_all(path);
  CHECK(recs.size() == 2);
  CHECK_THROWS_AS(read_grd1_file(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("split assignment is a seeded exact partition") {
  const auto a = assign_splits(100, {}, 5), b = assign_splits(100, {}, 5), c = assign_splits(100, {}, 6);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(std::count(a.begin(), a.end(), "train") == 70);
  CHECK(std::count(a.begin(), a.end(), "val") == 20);
  CHECK(std::count(a.begin(), a.end(), "test") == 10);
  const auto small = assign_splits(4, {}, 1);
  CHECK(std::count(small.begin(), small.end(), "test") == 1);
  CHECK(std::count(small.begin(), small.end(), "val") == 1);
  const auto alt = assign_splits(100, {0.7, 0.15, 0.15}, 1);
  CHECK(std::count(alt.begin(), alt.end(), "val") == 15);
}

TEST_CASE("manifest round trip and validation") {
  const auto dir = std::filesystem::temp_directory_path() / "arbires_test_manifest";
  std::filesystem::remove_all(dir);
  DatasetManifest m;
  m.dataset_id = "demo";
  m.source = "external-grid";
  m.channels = {"uo", "vo"};
  m.ladder = {128, 64, 32, 16};
  m.boundary = grid::Boundary::Replicate;
  m.norm.mean = {0.1, -0.2};
  m.norm.std = {1.0 / 3.0, 2.0};
  m.config = {{"patch", "128"}};
  m.records = {{"p0", "train"}, {"p1", "val"}, {"p2", "test"}};
  m.checksum = "abc";
  write_manifest(dir, m);
  const DatasetManifest back = read_manifest(dir);
  CHECK(back.channels == m.channels);
  CHECK(back.ladder == m.ladder);
  CHECK(back.boundary == grid::Boundary::Replicate);
  CHECK(back.norm.std[0] == m.norm.std[0]);
  CHECK(back.config_value("patch") == "128");
  CHECK(back.records.size() == 3);

  m.records.push_back({"p0", "test"});
  CHECK_THROWS_AS(m.validate(), FormatError);
  m.records.pop_back();
  m.ladder = {128, 48};
  CHECK_THROWS_AS(m.validate(), FormatError);
  std::filesystem::remove_all(dir);
}

namespace {

std::filesystem::path ingest_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("arbires_ingest_" + tag);
  std::filesystem::remove_all(dir);
  return dir;
}

Grd1Record ramp_source(std::size_t n) {
  Grd1Record r;
  r.dims = {2, n, n};
  r.names = {"uo", "vo"};
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (std::size_t k = 0; k < 2 * n * n; ++k) r.data.push_back(0.01 * static_cast<double>(k % n) + nd(rng));
  return r;
}

}  // namespace

TEST_CASE("ingest tiles a 256x256 source into four patches with pooled copies") {
  const auto dir = ingest_dir("tile");
  IngestOptions opts;
  opts.factors = {2, 8};
  const Grd1Record src = ramp_source(256);
  const DatasetManifest m = ingest_grid(src, opts, dir);
  CHECK(m.records.size() == 4);
  CHECK(m.ladder == std::vector<std::size_t>{128, 64, 16});
  CHECK(m.dropped.empty());
  CHECK(m.channels == std::vector<std::string>{"uo", "vo"});
  for (const auto& rec : m.records) {
    const Grd1Record base = read_grd1_file(record_path(dir, rec.id, 128));
    const Grd1Record small = read_grd1_file(record_path(dir, rec.id, 16));
    CHECK(small.dims == std::vector<std::uint64_t>{2, 1, 16, 16});
    for (std::size_t c = 0; c < 2; ++c) {
      double a = 0, b = 0;
      for (std::size_t i = 0; i < 128 * 128; ++i) a += base.data[c * 128 * 128 + i];
      for (std::size_t i = 0; i < 16 * 16; ++i) b += small.data[c * 16 * 16 + i];
      CHECK(b / 256 == doctest::Approx(a / (128 * 128)).epsilon(1e-12));
    }
  }
  // patch_00001 is the top-right tile.
  const Grd1Record p1 = read_grd1_file(record_path(dir, "patch_00001", 128));
  CHECK(p1.data[0] == src.data[128]);
  CHECK(p1.data[128 * 128 + 127 * 128 + 5] == src.data[256 * 256 + 127 * 256 + 133]);
  CHECK(read_manifest(dir).checksum == m.checksum);
}

TEST_CASE("ingest splits and checksums are seed-deterministic") {
  IngestOptions opts;
  opts.patch.size = 32;
  opts.seed = 4;
  const Grd1Record src = ramp_source(320);
  const DatasetManifest a = ingest_grid(src, opts, ingest_dir("det_a"));
  const DatasetManifest b = ingest_grid(src, opts, ingest_dir("det_b"));
  CHECK(a.records.size() == 100);
  CHECK(a.checksum == b.checksum);
  CHECK(a.ids("train").size() == 70);
  CHECK(a.ids("val").size() == 20);
  CHECK(a.ids("test").size() == 10);
  opts.seed = 5;
  const DatasetManifest c = ingest_grid(src, opts, ingest_dir("det_c"));
  CHECK(c.ids("test") != a.ids("test"));
}

TEST_CASE("ingest drops patches with missing cells and rejects mismatched channels") {
  Grd1Record src = ramp_source(64);
  src.data[(1 * 64 + 40) * 64 + 10] = std::nan("");
  IngestOptions opts;
  opts.patch.size = 32;
  opts.factors = {2};
  const DatasetManifest m = ingest_grid(src, opts, ingest_dir("nan"));
  CHECK(m.records.size() == 3);
  CHECK(m.dropped == std::vector<std::string>{"r32c0"});

  opts.channels = {"u", "v"};
  CHECK_THROWS_AS(ingest_grid(src, opts, ingest_dir("chan")), FormatError);
  opts.channels.clear();
  opts.factors = {3};
  CHECK_THROWS_AS(ingest_grid(src, opts, ingest_dir("factor")), FormatError);
  src.dims = {2, 2, 64, 32};
  CHECK_THROWS_AS(ingest_grid(src, opts, ingest_dir("dims")), FormatError);
}

TEST_CASE("synthetic currents are divergence free with the requested rms speed") {
  SynthOptions so;
  so.height = so.width = 64;
  so.seed = 2;
  const Grd1Record r = synth_grid(so);
  REQUIRE(r.dims == std::vector<std::uint64_t>{2, 64, 64});
  double ss = 0;
  for (double v : r.data) ss += v * v;
  CHECK(std::sqrt(ss / (64 * 64)) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(synth_grid(so).data == r.data);
  CHECK(ns::max_spectral_divergence(grid::Field(2, 64, 64, r.data)) < 1e-10);
  so.islands = 3;
  const Grd1Record land = synth_grid(so);
  std::size_t nan = 0;
  for (double v : land.data) nan += std::isnan(v);
  CHECK(nan > 0);
}

TEST_CASE("png round trip and deterministic bytes") {
  Image img(37, 21);
  img.fill_rect(3, 4, 10, 12, {10, 200, 30});
  img.line(0, 20, 36, 0, {255, 0, 0});
  img.text(12, 2, "Ab1.", {0, 0, 255});
  const auto dir = ingest_dir("png");
  std::filesystem::create_directories(dir);
  write_png(dir / "a.png", img);
  write_png(dir / "b.png", img);
  CHECK(file_crc32(dir / "a.png") == file_crc32(dir / "b.png"));
  const Image back = read_png(dir / "a.png");
  CHECK(back.width() == 37);
  CHECK(back.height() == 21);
  CHECK(back.pixels() == img.pixels());
  CHECK(img.at(5, 5) == Rgb{10, 200, 30});
  std::ofstream(dir / "bad.png") << "nope";
  CHECK_THROWS_AS(read_png(dir / "bad.png"), FormatError);
}

TEST_CASE("panels: layout and a white difference for a perfect prediction") {
  Grd1Record truth;
  truth.dims = {2, 16, 16};
  truth.names = {"uo", "vo"};
  for (int k = 0; k < 512; ++k) truth.data.push_back(std::sin(0.1 * k));
  const Image img = plot_panels(truth, truth);
  // 10-pixel cells, three 160-pixel columns.
  CHECK(img.width() == 3 * 160 + 40);
  CHECK(img.height() == 24 + 2 * (160 + 14 + 10) + 10);
  const long diff_x = 10 + 2 * 170 + 80, row_y = 24 + 14 + 80;
  CHECK(img.at(diff_x, row_y) == Rgb{255, 255, 255});
  CHECK(img.at(10 + 80, row_y) == img.at(10 + 170 + 80, row_y));
  Grd1Record other = truth;
  other.dims = {2, 1, 16, 16};
  CHECK_THROWS_AS(plot_panels(other, truth), FormatError);
}

TEST_CASE("curves from training logs and result tables") {
  const auto dir = ingest_dir("curves");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "log.csv") << "epoch,steps,train_loss,val_mae,val_mse,val_psnr,val_ssim\n"
                                 << "1,4,0.9,,,,\n2,8,0.5,0.3,0.2,20,0.8\n3,12,0.2,0.2,0.1,23,0.9\n";
  const Image a = plot_curves(dir / "log.csv");
  CHECK(a.width() == 840);
  CHECK(a.height() == 600);
  std::ofstream(dir / "eval.csv") << "# units: physical\n" << std::string("model,loss,resolution,mae,mse,psnr,ssim,n\n")
                                  << "dfno,l2,32,0.1,0.01,30,0.9,10\ndfno,l2,64,0.2,0.04,25,0.8,10\n"
                                  << "bicubic,none,32,0.15,0.02,28,0.85,10\n";
  const Image b = plot_curves(dir / "eval.csv");
  CHECK(b.height() == 600);
  std::ofstream(dir / "junk.csv") << "a,b\n1,2\n";
  CHECK_THROWS_AS(plot_curves(dir / "junk.csv"), FormatError);
}

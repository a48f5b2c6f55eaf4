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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arbires/io/ingest.hpp"
#include "arbires/train/trainer.hpp"
#include "support/ssim_oracle.hpp"

using namespace arbires;
using namespace arbires::train;
using ad::Graph;
using ad::Tensor;
using ad::Var;

namespace {

std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("arbires_train_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// 64x64 synthetic currents tiled into sixteen 16x16 patches with 8 and 4
// pooled copies.
io::DatasetManifest small_grid(const std::filesystem::path& dir) {
  io::SynthOptions so;
  so.height = so.width = 64;
  so.rolloff = 4;
  so.seed = 11;
  io::IngestOptions io_opts;
  io_opts.patch.size = 16;
  io_opts.factors = {2, 4};
  io_opts.seed = 5;
  return io::ingest_grid(io::synth_grid(so), io_opts, dir);
}

models::ModelSpec toy_dfno() {
  models::ModelSpec s;
  s.variant = models::Variant::DFNO;
  s.in_channels = s.out_channels = 2;
  s.blocks = 2;
  s.width = 6;
  s.modes = 2;
  s.projection = 8;
  s.boundary = grid::Boundary::Replicate;
  s.seed = 3;
  return s;
}

TrainConfig toy_config() {
  TrainConfig c;
  c.epochs = 3;
  c.batch = 4;
  c.input_res = 8;
  c.target_res = {16};
  return c;
}

std::vector<double> flat_params(const models::Model& m) {
  std::vector<double> out;
  for (const auto& [name, p] : m.params()) out.insert(out.end(), p.value.storage().begin(), p.value.storage().end());
  return out;
}

}  // namespace

TEST_CASE("losses: identical inputs and constant offsets") {
  Graph g;
  Tensor a({2, 1, 3, 3});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (double& v : a.storage()) v = nd(rng);
  Tensor b = a;
  for (double& v : b.storage()) v += 0.5;
  const Var pa = g.constant(a), pb = g.constant(b);
  CHECK(loss(LossKind::L1, pa, pa).value().item() == 0.0);
  CHECK(loss(LossKind::L2, pa, pa).value().item() == 0.0);
  CHECK(loss(LossKind::L1, pa, pb).value().item() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(loss(LossKind::L2, pa, pb).value().item() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mae(a.values(), b.values()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mse(a.values(), b.values()) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(loss(LossKind::L2, pa, g.constant(Tensor({2, 1, 3, 4}))), ad::AdError);
  CHECK(parse_loss("mae") == LossKind::L1);
  CHECK(parse_loss("L2") == LossKind::L2);
  CHECK_THROWS(parse_loss("huber"));
}

TEST_CASE("mse gradient is 2 (p - t) / n") {
  Graph g;
  Tensor p({1, 1, 2, 3}, {0.1, -0.4, 2.0, 1.5, 0.0, -3.0});
  Tensor t({1, 1, 2, 3}, {1.0, 1.0, 1.0, -1.0, -1.0, -1.0});
  const Var vp = g.variable(p);
  g.backward(loss(LossKind::L2, vp, g.constant(t)));
  const Tensor& gr = g.grad(vp);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(gr[i] == doctest::Approx(2 * (p[i] - t[i]) / 6).epsilon(1e-14));
}

TEST_CASE("psnr: worked example, identical sentinel, monotone in noise") {
  CHECK(psnr_from_mse(0.01, 1.0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(psnr_from_mse(0.25, 2.0) == doctest::Approx(10 * std::log10(16.0)).epsilon(1e-12));
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  CHECK(psnr(x, x, 1.0) == kPsnrIdentical);
  CHECK_THROWS(psnr_from_mse(0.1, 0.0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::vector<double> base(256), noise(256);
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = std::sin(0.1 * i), noise[i] = nd(rng);
  double last = kPsnrIdentical;
  for (double amp : {1e-3, 1e-2, 0.1, 0.5}) {
    std::vector<double> y = base;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += amp * noise[i];
    const double v = psnr(y, base, 2.0);
    CHECK(v < last);
    last = v;
  }
}

TEST_CASE("ssim: self similarity is exactly one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-1, 1);
  for (std::size_t n : {1u, 5u, 12u, 40u}) {
    std::vector<double> x(n * n);
    for (double& v : x) v = ud(rng);
    CHECK(ssim_plane(x.data(), x.data(), n, n, 2.0) == 1.0);
  }
}

TEST_CASE("ssim agrees with a direct windowed evaluation") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = 8, w = trial % 2 ? 8 : 13;
    std::vector<double> x(h * w), y(h * w);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = ud(rng), y[i] = 0.6 * x[i] + 0.4 * ud(rng);
    const double range = 1.0 + 0.1 * trial;
    CHECK(ssim_plane(x.data(), y.data(), h, w, range) ==
          doctest::Approx(testing::ssim_oracle(x, y, h, w, range)).epsilon(1e-6));
  }
  std::vector<double> x(16, 1.0);
  CHECK_THROWS(ssim_plane(x.data(), x.data(), 4, 4, 0.0));
}

TEST_CASE("normalisation round trip and training-split statistics") {
  NormStats s{{1.5, -2.0}, {0.3, 4.0}};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0, 10);
  std::vector<double> v(100), orig;
  for (double& x : v) x = nd(rng);
  orig = v;
  s.normalize(1, v);
  s.denormalize(1, v);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(orig[i]).epsilon(1e-12));

  const auto dir = scratch_dir("norm");
  const io::DatasetManifest m = small_grid(dir);
  NormAccumulator train_acc(2), all_acc(2);
  for (const auto& rec : m.records) {
    const io::Grd1Record r = io::read_grd1_file(io::record_path(dir, rec.id, 16));
    const std::size_t plane = r.data.size() / 2;
    for (std::size_t c = 0; c < 2; ++c) {
      const std::span<const double> part(r.data.data() + c * plane, plane);
      all_acc.add(c, part);
      if (rec.split == "train") train_acc.add(c, part);
    }
  }
  const NormStats train_stats = train_acc.finish(), all_stats = all_acc.finish();
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(m.norm.mean[c] == doctest::Approx(train_stats.mean[c]).epsilon(1e-12));
    CHECK(m.norm.std[c] == doctest::Approx(train_stats.std[c]).epsilon(1e-12));
    CHECK(m.norm.mean[c] != doctest::Approx(all_stats.mean[c]).epsilon(1e-9));
  }
}

TEST_CASE("dataset view: normalised inputs, physical ranges, missing resolutions") {
  const auto dir = scratch_dir("view");
  const io::DatasetManifest m = small_grid(dir);
  const DatasetView view(dir, m, "train", {8, 16});
  CHECK(view.size() == m.ids("train").size());
  CHECK(view.channels() == 2);
  const std::vector<std::size_t> idx{0, 1};
  const Tensor in = view.inputs(idx, 8), out = view.targets(idx, 16);
  CHECK(in.shape() == ad::Shape{2, 2, 8, 8});
  CHECK(out.shape() == ad::Shape{2, 2, 16, 16});
  // Pooling commutes with the affine normalisation.
  Graph g;
  const Tensor pooled = ad::avg_pool(g.constant(out), 2).value();
  for (std::size_t i = 0; i < in.size(); ++i) CHECK(pooled[i] == doctest::Approx(in[i]).epsilon(1e-12));

  const io::Grd1Record raw = io::read_grd1_file(io::record_path(dir, m.ids("train")[0], 16));
  NormStats s = view.norm();
  std::vector<double> phys(out.storage().begin(), out.storage().begin() + 256);
  s.denormalize(0, phys);
  for (std::size_t i = 0; i < phys.size(); ++i) CHECK(phys[i] == doctest::Approx(raw.data[i]).epsilon(1e-12));
  for (double r : view.channel_range()) CHECK(r > 0.0);
  CHECK_FALSE(view.has_resolution(4));
  CHECK_THROWS_AS(DatasetView(dir, m, "train", {32}), io::FormatError);
}

TEST_CASE("training is deterministic and lr = 0 leaves parameters unchanged") {
  const auto dir = scratch_dir("det");
  const io::DatasetManifest m = small_grid(dir);
  const DatasetView tr(dir, m, "train", {8, 16}), va(dir, m, "val", {8, 16});
  auto run = [&](double lr) {
    models::Model model(toy_dfno());
    TrainConfig c = toy_config();
    c.lr = lr;
    const TrainResult res = train::train(model, tr, &va, c);
    return std::make_pair(flat_params(model), res);
  };
  const auto [pa, ra] = run(1e-2);
  const auto [pb, rb] = run(1e-2);
  CHECK(pa == pb);
  REQUIRE(ra.log.size() == rb.log.size());
  for (std::size_t e = 0; e < ra.log.size(); ++e) CHECK(ra.log[e].train_loss == rb.log[e].train_loss);
  CHECK(ra.steps == 3 * ((tr.size() + 3) / 4));

  const std::vector<double> init = flat_params(models::Model(toy_dfno()));
  CHECK(run(0.0).first == init);
  CHECK(pa != init);
}

TEST_CASE("training reduces the loss on a handful of samples") {
  const auto dir = scratch_dir("fit");
  const io::DatasetManifest m = small_grid(dir);
  ViewOptions vo;
  vo.limit = 4;
  const DatasetView tr(dir, m, "train", {8, 16}, vo);
  models::Model model(toy_dfno());
  TrainConfig c = toy_config();
  c.epochs = 150;
  c.lr = 5e-3;
  const TrainResult res = train::train(model, tr, nullptr, c);
  CHECK(res.log.back().train_loss < 0.2 * res.log.front().train_loss);
}

TEST_CASE("checkpoint and log are written with the best validation epoch") {
  const auto dir = scratch_dir("ckpt");
  const io::DatasetManifest m = small_grid(dir);
  const DatasetView tr(dir, m, "train", {8, 16}), va(dir, m, "val", {8, 16});
  models::Model model(toy_dfno());
  TrainOutputs out{dir / "model.ckpt", dir / "log.csv", {{"dataset", "toy"}}};
  const TrainResult res = train::train(model, tr, &va, toy_config(), out);
  REQUIRE(std::filesystem::exists(out.checkpoint));
  nlohmann::json meta;
  models::Model loaded = models::load_checkpoint(out.checkpoint, &meta);
  CHECK(flat_params(loaded) == flat_params(model));
  CHECK(meta.at("dataset") == "toy");
  CHECK(meta.at("epoch") == res.best_epoch);
  double best = 1e300;
  for (const auto& e : res.log) best = std::min(best, e.val_mse);
  CHECK(res.best_val_mse == best);

  std::ifstream log(out.log_csv);
  std::string header;
  std::getline(log, header);
  CHECK(header == "epoch,steps,train_loss,val_mae,val_mse,val_psnr,val_ssim");
  std::size_t lines = 0;
  for (std::string line; std::getline(log, line);) ++lines;
  CHECK(lines == res.log.size());
}

TEST_CASE("config validation") {
  TrainConfig c = toy_config();
  CHECK_NOTHROW(c.validate());
  c.lr = -1;
  CHECK_THROWS(c.validate());
  c = toy_config();
  c.target_res.clear();
  CHECK_THROWS(c.validate());
  c = toy_config();
  c.target_weights = {1.0, 2.0};
  CHECK_THROWS(c.validate());
}

TEST_CASE("evaluation: identity reference, physical units, reproducibility") {
  const auto dir = scratch_dir("eval");
  const io::DatasetManifest m = small_grid(dir);
  const DatasetView te(dir, m, "test", {4, 8, 16});
  const auto same = evaluate_bicubic(te, {16}, 16, grid::Boundary::Replicate);
  REQUIRE(same.size() == 1);
  CHECK(same[0].mae == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same[0].ssim == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(same[0].psnr > 200.0);

  // The 8 -> 16 row against a by-hand computation on the stored files.
  const auto rows = evaluate_bicubic(te, {4, 16, 32}, 8, grid::Boundary::Replicate);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].resolution == 4);
  CHECK_FALSE(rows[0].skipped.empty());
  CHECK_FALSE(rows[2].skipped.empty());
  double se = 0.0;
  std::size_t count = 0;
  for (const auto& id : m.ids("test")) {
    const io::Grd1Record lo = io::read_grd1_file(io::record_path(dir, id, 8));
    const io::Grd1Record hi = io::read_grd1_file(io::record_path(dir, id, 16));
    Graph g;
    const Tensor up = ad::interpolate(g.constant(Tensor({1, 2, 8, 8}, lo.data)), 16, 16,
                                      grid::ResampleMode::Bicubic, grid::Boundary::Replicate)
                          .value();
    for (std::size_t i = 0; i < hi.data.size(); ++i) se += std::pow(up[i] - hi.data[i], 2);
    count += hi.data.size();
  }
  CHECK(rows[1].mse == doctest::Approx(se / count).epsilon(1e-9));
  CHECK(rows[1].n == m.ids("test").size());

  models::Model model(toy_dfno());
  EvalOptions eo;
  eo.input_res = 8;
  eo.model_label = "dfno";
  eo.loss_label = "l2";
  const auto a = evaluate(model, te, {16, 8}, eo), b = evaluate(model, te, {8, 16}, eo);
  REQUIRE(a.size() == 2);
  CHECK(a[0].resolution == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mse == b[i].mse);
    CHECK(a[i].ssim == b[i].ssim);
  }
}

TEST_CASE("eval csv layout") {
  const auto dir = scratch_dir("csv");
  EvalRow ok{"dfno", "l2", 64, 0.5, 0.25, 12.0, 0.9, 10, ""};
  EvalRow skip{"cnn2", "l1", 256, 0, 0, 0, 0, 0, "resolution 256 unavailable"};
  write_eval_csv(dir / "eval.csv", {ok, skip}, {{"dataset", "toy"}});
  std::ifstream in(dir / "eval.csv");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() >= 4);
  CHECK(lines[0] == "# dataset: toy");
  bool header = false, row = false, skipped = false;
  for (const auto& l : lines) {
    header |= l == kEvalCsvHeader;
    row |= l.rfind("dfno,l2,64,", 0) == 0;
    skipped |= l.find("# skipped") == 0 && l.find("256") != std::string::npos;
  }
  CHECK(header);
  CHECK(row);
  CHECK(skipped);
}

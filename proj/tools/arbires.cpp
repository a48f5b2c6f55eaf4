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

// Command-line front end: dataset generation and ingestion, training,
// evaluation, zero-shot prediction and figures.
//
// Exit codes: 0 success, 1 usage, 2 data, 3 numeric failure. Failures also
// print one JSON object on stderr.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "arbires/io/ingest.hpp"
#include "arbires/io/plot.hpp"
#include "arbires/models/model.hpp"
#include "arbires/ns/dataset.hpp"
#include "arbires/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace arbires;
using nlohmann::json;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative dataset paths resolve against $ARBIRES_DATA_ROOT when set.
fs::path data_path(const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("ARBIRES_DATA_ROOT"); root && *root) return fs::path(root) / path;
  return path;
}

io::SplitRatios parse_splits(const std::vector<double>& v) {
  if (v.size() != 3) throw UsageError("--split takes three ratios, e.g. 0.7,0.2,0.1");
  return {v[0], v[1], v[2]};
}

double resolve_padding(const std::string& s, grid::Boundary boundary) {
  if (s == "auto") return boundary == grid::Boundary::Periodic ? 0.0 : 0.125;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw UsageError("--padding takes 'auto' or a fraction, got '" + s + "'");
  }
}

std::pair<std::size_t, std::size_t> parse_hw(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) {
      const std::size_t n = std::stoul(s);
      return {n, n};
    }
    return {std::stoul(s.substr(0, x)), std::stoul(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw UsageError("expected HxW, got '" + s + "'");
  }
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

train::NormStats norm_from_meta(const json& meta) {
  train::NormStats s;
  try {
    s.mean = meta.at("norm").at("mean").get<std::vector<double>>();
    s.std = meta.at("norm").at("std").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw io::FormatError("checkpoint carries no normalisation statistics");
  }
  return s;
}

// --- gen-ns --------------------------------------------------------------------

struct GenNsArgs {
  std::size_t sims = 10;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t resolution = 64;
  std::size_t steps = 50;
  double interval = 1.0;
  double viscosity = 1e-4;
  double forcing = 0.1;
  double max_dt = 1e-3;
  std::vector<std::size_t> pooled{32, 16};
  std::size_t window_in = 5, window_out = 5;
  std::vector<double> split{0.7, 0.2, 0.1};
  std::string id = "ns";
  bool quiet = false;
};

int run_gen_ns(const GenNsArgs& a) {
  ns::NSConfig cfg;
  cfg.resolution = a.resolution;
  cfg.record_steps = a.steps;
  cfg.record_interval = a.interval;
  cfg.viscosity = a.viscosity;
  cfg.forcing_amplitude = a.forcing;
  cfg.max_dt = a.max_dt;
  cfg.seed = a.seed;
  ns::GenerateOptions opts;
  opts.n_sims = a.sims;
  opts.pooled = a.pooled;
  opts.window_in = a.window_in;
  opts.window_out = a.window_out;
  opts.splits = parse_splits(a.split);
  opts.dataset_id = a.id;
  if (!a.quiet) opts.progress = [](std::size_t done, std::size_t total) {
    std::cerr << "\rsimulated " << done << "/" << total << std::flush;
    if (done == total) std::cerr << "\n";
  };
  const io::DatasetManifest m = ns::generate_dataset(cfg, {}, opts, data_path(a.out));
  std::cout << "dataset " << m.dataset_id << ": " << m.records.size() << " simulations (" << m.ids("train").size()
            << "/" << m.ids("val").size() << "/" << m.ids("test").size() << "), " << m.dropped.size()
            << " dropped, checksum " << m.checksum << "\n";
  return 0;
}

// --- synth-grid / ingest -------------------------------------------------------

struct SynthArgs {
  io::SynthOptions opts;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  const io::Grd1Record r = io::synth_grid(a.opts);
  io::write_grd1_file(data_path(a.out), r);
  std::cout << "wrote " << a.out << " [" << r.dims[0] << ", " << r.dims[1] << ", " << r.dims[2] << "]\n";
  return 0;
}

struct IngestArgs {
  std::string in, out;
  io::PatchSpec patch;
  std::vector<std::size_t> region;
  std::vector<std::size_t> factors{2, 4, 8};
  std::vector<double> split{0.7, 0.2, 0.1};
  std::uint64_t seed = 0;
  std::string id = "grid";
  std::vector<std::string> channels;
  std::string boundary = "replicate";
};

int run_ingest(IngestArgs a) {
  io::IngestOptions o;
  o.patch = a.patch;
  if (!a.region.empty()) {
    if (a.region.size() != 4) throw UsageError("--region takes row_begin,row_end,col_begin,col_end");
    o.patch.row_begin = a.region[0], o.patch.row_end = a.region[1];
    o.patch.col_begin = a.region[2], o.patch.col_end = a.region[3];
  }
  o.factors = a.factors;
  o.splits = parse_splits(a.split);
  o.seed = a.seed;
  o.dataset_id = a.id;
  o.channels = a.channels;
  o.boundary = grid::parse_boundary(a.boundary);
  const io::DatasetManifest m = io::ingest_grid(io::read_grd1_file(data_path(a.in)), o, data_path(a.out));
  std::cout << "dataset " << m.dataset_id << ": " << m.records.size() << " patches (" << m.ids("train").size() << "/"
            << m.ids("val").size() << "/" << m.ids("test").size() << "), " << m.dropped.size()
            << " dropped, checksum " << m.checksum << "\n";
  return 0;
}

// --- train ---------------------------------------------------------------------

struct TrainArgs {
  std::string data, model = "dfno", loss = "l2", out, log;
  std::size_t epochs = 600, batch = 16, eval_every = 1, max_steps = 0;
  double lr = 1e-3, lr_decay = 1.0;
  std::uint64_t seed = 0;
  std::size_t input_res = 0;
  std::vector<std::size_t> target_res;
  std::vector<double> target_weights;
  models::ModelSpec spec;
  std::string padding = "auto";
  std::string constraint = "off";
  std::string adapter = "structural";
  std::size_t window_stride = 1, limit = 0;
  bool modes_given = false;
  bool quiet = false;
};

int run_train(TrainArgs a) {
  const fs::path root = data_path(a.data);
  const io::DatasetManifest m = io::read_manifest(root);
  const bool temporal = m.window_in > 0;

  models::ModelSpec s = a.spec;
  s.variant = models::parse_variant(a.model);
  if (s.temporal() != temporal)
    throw UsageError(std::string("model ") + a.model + (temporal ? " is static but the dataset is temporal"
                                                                 : " is temporal but the dataset is static"));
  s.in_channels = s.out_channels = m.channels.size();
  s.boundary = m.boundary;
  if (temporal) s.window = m.window_in;
  if (temporal && !a.modes_given) s.modes = 8;
  s.padding = resolve_padding(a.padding, m.boundary);
  s.adapter = models::parse_adapter(a.adapter);
  if (a.constraint != "off" && a.constraint != "train" && a.constraint != "eval")
    throw UsageError("--constraint takes off, train or eval");
  s.constraint = a.constraint == "train";

  train::TrainConfig c;
  c.lr = a.lr;
  c.epochs = a.epochs;
  c.batch = a.batch;
  c.loss = train::parse_loss(a.loss);
  c.seed = a.seed;
  c.eval_every = a.eval_every;
  c.max_steps = a.max_steps;
  c.lr_decay = a.lr_decay;
  const std::size_t coarsest = *std::min_element(m.ladder.begin(), m.ladder.end());
  c.input_res = a.input_res ? a.input_res : coarsest;
  if (!a.target_res.empty())
    c.target_res = a.target_res;
  else if (temporal)
    c.target_res = {c.input_res, 2 * c.input_res};
  else
    c.target_res = {(s.variant == models::Variant::CNN4 ? 4 : 2) * c.input_res};
  c.target_weights = a.target_weights;
  c.validate();
  if (!s.cnn())
    for (std::size_t r : c.target_res)
      if (2 * s.modes > r)
        throw UsageError("--modes " + std::to_string(s.modes) + " exceeds the Nyquist limit of the " +
                         std::to_string(r) + "x" + std::to_string(r) + " target (at most " + std::to_string(r / 2) +
                         ")");
  for (std::size_t r : c.target_res)
    if (!m.has_resolution(r))
      throw io::FormatError("target resolution " + std::to_string(r) + " is not stored in " + root.string());

  std::vector<std::size_t> res = c.target_res;
  res.push_back(c.input_res);
  res = sorted_unique(res);
  train::ViewOptions vo;
  vo.temporal = temporal;
  vo.window_stride = a.window_stride;
  vo.limit = a.limit;
  const train::DatasetView tr(root, m, "train", res, vo);
  std::optional<train::DatasetView> va;
  if (!m.ids("val").empty()) va.emplace(root, m, "val", res, vo);

  models::Model model(s);
  train::TrainOutputs outs;
  outs.checkpoint = data_path(a.out);
  outs.log_csv = a.log.empty() ? fs::path(outs.checkpoint.string() + ".log.csv") : data_path(a.log);
  outs.meta = {{"dataset", m.dataset_id},
               {"dataset_checksum", m.checksum},
               {"channels", m.channels},
               {"constraint_at_eval", a.constraint == "eval"}};
  if (!a.quiet)
    std::cerr << "training " << a.model << " on " << tr.size() << " samples, " << model.params().trainable_count()
              << " parameters, " << c.input_res << " -> " << json(c.target_res).dump() << "\n";
  const train::TrainResult r = train::train(model, tr, va ? &*va : nullptr, c, outs);
  std::cout << "trained " << r.steps << " steps; ";
  if (va)
    std::cout << "best epoch " << r.best_epoch << ", val mse " << r.best_val_mse;
  else
    std::cout << "no validation split, kept epoch " << r.best_epoch;
  std::cout << "; checkpoint " << outs.checkpoint.string() << "\n";
  return 0;
}

// --- eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string ckpt, data, csv, split = "test", constraint = "auto";
  std::vector<std::size_t> res;
  std::size_t input_res = 0, batch = 16, upsample_from = 0, window_stride = 1, limit = 0;
  bool bicubic = false;
};

struct LoadedModel {
  models::Model model;
  json meta;
};

LoadedModel load(const std::string& ckpt, const std::string& constraint) {
  json meta;
  models::Model model = models::load_checkpoint(data_path(ckpt), &meta);
  bool on = model.spec().constraint;
  if (constraint == "auto")
    on = on || meta.value("constraint_at_eval", false);
  else if (constraint == "on")
    on = true;
  else if (constraint == "off")
    on = false;
  else
    throw UsageError("--constraint takes auto, on or off");
  if (on != model.spec().constraint) model.set_constraint(on);
  return {std::move(model), meta};
}

int run_eval(const EvalArgs& a) {
  LoadedModel lm = load(a.ckpt, a.constraint);
  const fs::path root = data_path(a.data);
  io::DatasetManifest m = io::read_manifest(root);
  const train::NormStats norm = norm_from_meta(lm.meta);
  if (norm.channels() != m.channels.size())
    throw io::FormatError("checkpoint expects " + std::to_string(norm.channels()) + " channels, dataset has " +
                          std::to_string(m.channels.size()));
  // Inputs are normalised exactly as during training.
  m.norm = norm;
  const bool temporal = m.window_in > 0;
  if (temporal != lm.model.spec().temporal()) throw io::FormatError("checkpoint and dataset disagree on time windows");

  const std::size_t input_res =
      a.input_res ? a.input_res : lm.meta.at("train").at("input_res").get<std::size_t>();
  std::vector<std::size_t> wanted = a.res.empty() ? m.ladder : a.res;
  wanted = sorted_unique(wanted);
  std::vector<std::size_t> load_res{input_res};
  for (std::size_t r : wanted)
    if (m.has_resolution(r)) load_res.push_back(r);
  if (a.upsample_from && !m.has_resolution(a.upsample_from)) load_res.push_back(a.upsample_from);
  load_res = sorted_unique(load_res);
  if (!m.has_resolution(input_res)) throw io::FormatError("input resolution " + std::to_string(input_res) + " not stored");

  train::ViewOptions vo;
  vo.temporal = temporal;
  vo.window_stride = a.window_stride;
  vo.limit = a.limit;
  const train::DatasetView test(root, m, a.split, load_res, vo);

  const std::string tag = models::variant_tag(lm.model.spec().variant);
  const std::string loss = lm.meta.at("train").value("loss", "l2");
  train::EvalOptions eo;
  eo.input_res = input_res;
  eo.batch = a.batch;
  eo.model_label = tag;
  eo.loss_label = loss;
  std::vector<train::EvalRow> rows = train::evaluate(lm.model, test, wanted, eo);
  if (a.upsample_from) {
    eo.upsample_from = a.upsample_from;
    eo.model_label = tag + "+bicubic_from_" + std::to_string(a.upsample_from);
    const auto extra = train::evaluate(lm.model, test, wanted, eo);
    rows.insert(rows.end(), extra.begin(), extra.end());
  }
  if (a.bicubic) {
    if (temporal) throw UsageError("--bicubic needs a static dataset; use --upsample-from for temporal models");
    const auto extra = train::evaluate_bicubic(test, wanted, input_res, m.boundary);
    rows.insert(rows.end(), extra.begin(), extra.end());
  }
  std::string peaks;
  for (double r : test.channel_range()) peaks += (peaks.empty() ? "" : " ") + std::to_string(r);
  train::write_eval_csv(data_path(a.csv), rows,
                        {{"dataset", m.dataset_id},
                         {"dataset_checksum", m.checksum},
                         {"split", a.split},
                         {"input_res", std::to_string(input_res)},
                         {"constraint", lm.model.spec().constraint ? "on" : "off"},
                         {"units", "physical (denormalised)"},
                         {"psnr_peak", "per-channel max-min of the split at its finest loaded resolution: " + peaks}});
  for (const auto& r : rows) {
    if (!r.skipped.empty())
      std::cout << r.model << " @" << r.resolution << ": skipped (" << r.skipped << ")\n";
    else
      std::cout << r.model << " @" << r.resolution << ": mae " << r.mae << " mse " << r.mse << " psnr " << r.psnr
                << " ssim " << r.ssim << " (n=" << r.n << ")\n";
  }
  return 0;
}

// --- predict -------------------------------------------------------------------

struct PredictArgs {
  std::string ckpt, input, target, out, constraint = "auto";
};

int run_predict(const PredictArgs& a) {
  LoadedModel lm = load(a.ckpt, a.constraint);
  const models::ModelSpec& s = lm.model.spec();
  const train::NormStats norm = norm_from_meta(lm.meta);
  io::Grd1Record in = io::read_grd1_file(data_path(a.input));
  const std::size_t rank = s.temporal() ? 4 : 3;
  // A static [C, 1, H, W] record (as stored by ingest) is accepted as well.
  if (!s.temporal() && in.dims.size() == 4 && in.dims[1] == 1) in.dims.erase(in.dims.begin() + 1);
  if (in.dims.size() != rank)
    throw io::FormatError("predict: expected a " + std::string(s.temporal() ? "[C, T, H, W]" : "[C, H, W]") +
                          " input, got " + std::to_string(in.dims.size()) + " dims");
  if (in.dims[0] != s.in_channels)
    throw io::FormatError("predict: model takes " + std::to_string(s.in_channels) + " channels, input has " +
                          std::to_string(in.dims[0]));
  ad::Shape shape{1};
  for (std::uint64_t d : in.dims) shape.push_back(static_cast<std::size_t>(d));
  ad::Tensor x(shape, in.data);
  const std::size_t per_channel = x.size() / s.in_channels;
  for (std::size_t c = 0; c < s.in_channels; ++c) norm.normalize(c, std::span<double>(x.data() + c * per_channel, per_channel));

  const auto [h, w] = parse_hw(a.target);
  ad::Tensor y = lm.model.predict(x, h, w);
  for (double v : y.storage())
    if (!std::isfinite(v)) throw train::NumericError("predict: non-finite output");
  const std::size_t out_per_channel = y.size() / s.out_channels;
  for (std::size_t c = 0; c < s.out_channels; ++c)
    norm.denormalize(c, std::span<double>(y.data() + c * out_per_channel, out_per_channel));

  io::Grd1Record out;
  out.dtype = io::DType::F64;
  for (std::size_t k = 1; k < y.shape().size(); ++k) out.dims.push_back(y.shape()[k]);
  out.names = lm.meta.value("channels", in.names);
  out.data = std::move(y.storage());
  io::write_grd1_file(data_path(a.out), out);
  std::cout << "wrote " << a.out << " " << ad::shape_str(y.shape()) << "\n";
  return 0;
}

// --- plot ----------------------------------------------------------------------

struct PlotArgs {
  std::string kind = "curves", csv, out, pred, truth, ckpt, data, split = "test";
  std::size_t sample = 0, target_res = 0, input_res = 0;
};

int run_plot(const PlotArgs& a) {
  if (a.kind == "curves") {
    if (a.csv.empty()) throw UsageError("plot --kind curves needs --csv");
    io::write_png(data_path(a.out), io::plot_curves(data_path(a.csv)));
  } else if (a.kind == "panels") {
    io::Grd1Record pred, truth;
    if (!a.ckpt.empty()) {
      if (a.data.empty()) throw UsageError("plot --ckpt also needs --data");
      LoadedModel lm = load(a.ckpt, "auto");
      const fs::path root = data_path(a.data);
      io::DatasetManifest m = io::read_manifest(root);
      m.norm = norm_from_meta(lm.meta);
      const std::size_t in_res = a.input_res ? a.input_res : lm.meta.at("train").at("input_res").get<std::size_t>();
      const std::size_t out_res = a.target_res ? a.target_res : *std::max_element(m.ladder.begin(), m.ladder.end());
      train::ViewOptions vo;
      vo.temporal = m.window_in > 0;
      const train::DatasetView view(root, m, a.split, sorted_unique({in_res, out_res}), vo);
      if (a.sample >= view.size())
        throw io::FormatError("sample " + std::to_string(a.sample) + " outside a split of " + std::to_string(view.size()));
      const std::vector<std::size_t> idx{a.sample};
      ad::Tensor p = lm.model.predict(view.inputs(idx, in_res), out_res, out_res);
      ad::Tensor g = view.targets(idx, out_res);
      const std::size_t per = p.size() / m.channels.size();
      for (std::size_t c = 0; c < m.channels.size(); ++c) {
        m.norm.denormalize(c, std::span<double>(p.data() + c * per, per));
        m.norm.denormalize(c, std::span<double>(g.data() + c * per, per));
      }
      for (std::size_t k = 1; k < p.shape().size(); ++k) pred.dims.push_back(p.shape()[k]);
      truth.dims = pred.dims;
      pred.names = truth.names = m.channels;
      pred.data = p.storage();
      truth.data = g.storage();
    } else {
      if (a.pred.empty() || a.truth.empty()) throw UsageError("plot --kind panels needs --pred and --truth, or --ckpt");
      pred = io::read_grd1_file(data_path(a.pred));
      truth = io::read_grd1_file(data_path(a.truth));
    }
    io::write_png(data_path(a.out), io::plot_panels(pred, truth));
  } else {
    throw UsageError("--kind takes curves or panels");
  }
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit", code}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  ad::retain_freed_memory();
  CLI::App app{"Arbitrary-resolution downscaling of flow fields with neural operators"};
  app.require_subcommand(1);

  GenNsArgs gen;
  auto* g = app.add_subcommand("gen-ns", "Simulate 2D Navier-Stokes trajectories into a dataset");
  g->add_option("--sims", gen.sims, "Number of simulations")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "Seed of the first simulation");
  g->add_option("--out", gen.out, "Dataset directory")->required();
  g->add_option("--resolution", gen.resolution, "Solver grid size")->capture_default_str();
  g->add_option("--steps", gen.steps, "Recorded snapshots per simulation")->capture_default_str();
  g->add_option("--interval", gen.interval, "Time between snapshots")->capture_default_str();
  g->add_option("--viscosity", gen.viscosity)->capture_default_str();
  g->add_option("--forcing", gen.forcing, "Forcing amplitude")->capture_default_str();
  g->add_option("--max-dt", gen.max_dt, "Upper bound on the solver step")->capture_default_str();
  g->add_option("--pooled", gen.pooled, "Pooled resolutions stored next to the base")->delimiter(',');
  g->add_option("--window-in", gen.window_in)->capture_default_str();
  g->add_option("--window-out", gen.window_out)->capture_default_str();
  g->add_option("--split", gen.split, "train,val,test ratios")->delimiter(',');
  g->add_option("--id", gen.id, "Dataset id");
  g->add_flag("--quiet", gen.quiet);

  SynthArgs syn;
  auto* sg = app.add_subcommand("synth-grid", "Write a synthetic two-channel surface-current grid");
  sg->add_option("--height", syn.opts.height)->capture_default_str();
  sg->add_option("--width", syn.opts.width)->capture_default_str();
  sg->add_option("--slope", syn.opts.slope, "Spectral slope of the stream function")->capture_default_str();
  sg->add_option("--rolloff", syn.opts.rolloff, "Rolloff wavenumber (cycles per domain)")->capture_default_str();
  sg->add_option("--rms-speed", syn.opts.rms_speed)->capture_default_str();
  sg->add_option("--islands", syn.opts.islands, "Number of NaN land islands")->capture_default_str();
  sg->add_option("--seed", syn.opts.seed);
  sg->add_option("--out", syn.out, "GRD1 file")->required();

  IngestArgs ing;
  auto* in = app.add_subcommand("ingest", "Tile a gridded GRD1 field into a patch dataset");
  in->add_option("--in", ing.in, "Source GRD1 [C, H, W]")->required();
  in->add_option("--out", ing.out, "Dataset directory")->required();
  in->add_option("--patch", ing.patch.size, "Patch size")->capture_default_str();
  in->add_option("--stride", ing.patch.stride, "Patch stride (default: patch size)");
  in->add_option("--region", ing.region, "row_begin,row_end,col_begin,col_end")->delimiter(',');
  in->add_option("--factors", ing.factors, "Pooling factors")->delimiter(',');
  in->add_option("--split", ing.split, "train,val,test ratios")->delimiter(',');
  in->add_option("--seed", ing.seed, "Split shuffle seed");
  in->add_option("--id", ing.id, "Dataset id");
  in->add_option("--channels", ing.channels, "Expected channel names")->delimiter(',');
  in->add_option("--boundary", ing.boundary, "periodic or replicate")->capture_default_str();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model on a dataset");
  t->add_option("--data", tr.data, "Dataset directory")->required();
  t->add_option("--model", tr.model, "dfno, specdfno, metagrad, multigrad, temp_dfno, temp_specdfno, cnn2, cnn4")
      ->capture_default_str();
  t->add_option("--loss", tr.loss, "l1 or l2")->capture_default_str();
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--lr", tr.lr)->capture_default_str();
  t->add_option("--lr-decay", tr.lr_decay, "Per-epoch learning-rate factor")->capture_default_str();
  t->add_option("--batch", tr.batch)->capture_default_str();
  t->add_option("--seed", tr.seed, "Initialisation and shuffle seed");
  t->add_option("--eval-every", tr.eval_every, "Validate every k epochs")->capture_default_str();
  t->add_option("--max-steps", tr.max_steps, "Optimizer step cap (0 = none)");
  t->add_option("--out", tr.out, "Checkpoint path")->required();
  t->add_option("--log", tr.log, "Training log CSV (default: <out>.log.csv)");
  t->add_option("--input-res", tr.input_res, "Input resolution (default: coarsest stored)");
  t->add_option("--target-res", tr.target_res, "Supervised output resolutions")->delimiter(',');
  t->add_option("--target-weights", tr.target_weights, "Loss weight per target resolution")->delimiter(',');
  t->add_option("--blocks", tr.spec.blocks)->capture_default_str();
  t->add_option("--width", tr.spec.width)->capture_default_str();
  t->add_option("--modes", tr.spec.modes, "Spatial modes (temporal models default to 8)")->capture_default_str();
  t->add_option("--modes-t", tr.spec.modes_t, "Temporal modes")->capture_default_str();
  t->add_option("--projection", tr.spec.projection)->capture_default_str();
  t->add_option("--branch-width", tr.spec.branch_width, "Multiscale branch width")->capture_default_str();
  t->add_option("--unet-base", tr.spec.unet_base, "U-Net first-level width")->capture_default_str();
  t->add_option("--adapter", tr.adapter, "U-Net cross-factor adapter: structural or bicubic")->capture_default_str();
  t->add_option("--padding", tr.padding, "Fourier-stack zero padding fraction, or auto")->capture_default_str();
  t->add_option("--constraint", tr.constraint, "off, train or eval")->capture_default_str();
  t->add_option("--window-stride", tr.window_stride, "Use every k-th time window")->capture_default_str();
  t->add_option("--limit", tr.limit, "Cap on training samples (0 = all)");
  t->add_flag("--quiet", tr.quiet);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  e->add_option("--ckpt", ev.ckpt)->required();
  e->add_option("--data", ev.data)->required();
  e->add_option("--res", ev.res, "Output resolutions (default: the stored ladder)")->delimiter(',');
  e->add_option("--csv", ev.csv, "Result table")->required();
  e->add_option("--split", ev.split)->capture_default_str();
  e->add_option("--input-res", ev.input_res, "Input resolution (default: as trained)");
  e->add_option("--batch", ev.batch)->capture_default_str();
  e->add_option("--upsample-from", ev.upsample_from,
                "Also report the model's prediction at this resolution, bicubic-upsampled");
  e->add_flag("--bicubic", ev.bicubic, "Also report bicubic interpolation of the input");
  e->add_option("--constraint", ev.constraint, "auto, on or off")->capture_default_str();
  e->add_option("--window-stride", ev.window_stride)->capture_default_str();
  e->add_option("--limit", ev.limit, "Cap on evaluated samples (0 = all)");

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Zero-shot inference on one sample");
  p->add_option("--ckpt", pr.ckpt)->required();
  p->add_option("--input", pr.input, "GRD1 [C, H, W] or [C, T, H, W] in physical units")->required();
  p->add_option("--target", pr.target, "Output size HxW")->required();
  p->add_option("--out", pr.out, "GRD1 output")->required();
  p->add_option("--constraint", pr.constraint, "auto, on or off")->capture_default_str();

  PlotArgs pl;
  auto* f = app.add_subcommand("plot", "Render training curves, result tables or field panels to PNG");
  f->add_option("--kind", pl.kind, "curves or panels")->capture_default_str();
  f->add_option("--csv", pl.csv, "Training log or eval CSV (curves)");
  f->add_option("--out", pl.out, "PNG path")->required();
  f->add_option("--pred", pl.pred, "Prediction GRD1 (panels)");
  f->add_option("--truth", pl.truth, "Ground-truth GRD1 (panels)");
  f->add_option("--ckpt", pl.ckpt, "Checkpoint to predict a dataset sample with (panels)");
  f->add_option("--data", pl.data, "Dataset of the sample (panels)");
  f->add_option("--split", pl.split)->capture_default_str();
  f->add_option("--sample", pl.sample)->capture_default_str();
  f->add_option("--input-res", pl.input_res);
  f->add_option("--target-res", pl.target_res, "Output resolution (default: finest stored)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    return fail(kUsage, "usage", ex.what());
  }

  try {
    if (*g) return run_gen_ns(gen);
    if (*sg) return run_synth(syn);
    if (*in) return run_ingest(ing);
    if (*t) {
      tr.modes_given = t->get_option("--modes")->count() > 0;
      return run_train(tr);
    }
    if (*e) return run_eval(ev);
    if (*p) return run_predict(pr);
    if (*f) return run_plot(pl);
  } catch (const UsageError& ex) {
    return fail(kUsage, "usage", ex.what());
  } catch (const std::invalid_argument& ex) {
    return fail(kUsage, "usage", ex.what());
  } catch (const models::ModelError& ex) {
    return fail(kUsage, "usage", ex.what());
  } catch (const grid::GridError& ex) {
    return fail(kUsage, "usage", ex.what());
  } catch (const train::NumericError& ex) {
    return fail(kNumeric, "numeric", ex.what());
  } catch (const ns::BlowUpError& ex) {
    return fail(kNumeric, "numeric", ex.what());
  } catch (const io::FormatError& ex) {
    return fail(kData, "data", ex.what());
  } catch (const fs::filesystem_error& ex) {
    return fail(kData, "data", ex.what());
  } catch (const ad::AdError& ex) {
    return fail(kData, "data", ex.what());
  } catch (const std::exception& ex) {
    return fail(kData, "data", ex.what());
  }
  return fail(kUsage, "usage", "no subcommand");
}

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

#include "arbires/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "arbires/io/grd1.hpp"

namespace arbires::train {

using ad::Graph;
using ad::Tensor;
using ad::Var;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Running sums of the evaluation metrics in physical units.
class MetricSum {
 public:
  MetricSum(const NormStats& norm, const std::vector<double>& range)
      : norm_(norm), range_(range), abs_(norm.channels(), 0.0), sq_(norm.channels(), 0.0), count_(norm.channels(), 0) {}

  void add(const Tensor& pred, const Tensor& target) {
    if (pred.shape() != target.shape())
      throw ad::AdError("metrics: prediction " + ad::shape_str(pred.shape()) + " vs target " +
                        ad::shape_str(target.shape()));
    const ad::Shape& s = pred.shape();
    const std::size_t batch = s[0], channels = s[1], h = s[s.size() - 2], w = s[s.size() - 1];
    const std::size_t chunk = pred.size() / (batch * channels), planes = chunk / (h * w);
    std::vector<double> p(chunk), t(chunk);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t off = (b * channels + c) * chunk;
        std::copy(pred.data() + off, pred.data() + off + chunk, p.begin());
        std::copy(target.data() + off, target.data() + off + chunk, t.begin());
        norm_.denormalize(c, p);
        norm_.denormalize(c, t);
        for (std::size_t i = 0; i < chunk; ++i) {
          if (!std::isfinite(p[i])) throw NumericError("non-finite prediction");
          abs_[c] += std::abs(p[i] - t[i]);
          sq_[c] += (p[i] - t[i]) * (p[i] - t[i]);
        }
        count_[c] += chunk;
        ssim_sum_ += ssim(p.data(), t.data(), planes, h, w, peak(c)) * static_cast<double>(planes);
        ssim_planes_ += planes;
      }
    samples_ += batch;
  }

  EvalRow row() const {
    EvalRow r;
    double a = 0.0, q = 0.0, ps = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < abs_.size(); ++c) {
      a += abs_[c];
      q += sq_[c];
      n += count_[c];
      ps += psnr_from_mse(sq_[c] / static_cast<double>(count_[c]), peak(c));
    }
    r.mae = a / static_cast<double>(n);
    r.mse = q / static_cast<double>(n);
    r.psnr = ps / static_cast<double>(abs_.size());
    r.ssim = ssim_sum_ / static_cast<double>(ssim_planes_);
    r.n = samples_;
    return r;
  }

 private:
  double peak(std::size_t c) const { return range_[c] > 0.0 ? range_[c] : 1.0; }

  const NormStats& norm_;
  const std::vector<double>& range_;
  std::vector<double> abs_, sq_;
  std::vector<std::size_t> count_;
  double ssim_sum_ = 0.0;
  std::size_t ssim_planes_ = 0;
  std::size_t samples_ = 0;
};

std::vector<std::pair<std::size_t, std::size_t>> square_targets(const std::vector<std::size_t>& res) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r : res) out.emplace_back(r, r);
  return out;
}

std::vector<std::size_t> batch_indices(std::size_t begin, std::size_t end) {
  std::vector<std::size_t> idx(end - begin);
  std::iota(idx.begin(), idx.end(), begin);
  return idx;
}

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("train config: " + msg);
  };
  require(lr >= 0.0 && std::isfinite(lr), "lr must be finite and non-negative");
  require(epochs >= 1 && batch >= 1 && eval_every >= 1, "epochs, batch and eval_every must be positive");
  require(lr_decay > 0.0, "lr_decay must be positive");
  require(input_res >= 1 && !target_res.empty(), "input and target resolutions are required");
  require(target_weights.empty() || target_weights.size() == target_res.size(),
          "target_weights must match target_res");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"lr", lr},           {"epochs", epochs},         {"batch", batch},           {"loss", loss_name(loss)},
          {"seed", seed},       {"eval_every", eval_every}, {"max_steps", max_steps},   {"lr_decay", lr_decay},
          {"input_res", input_res}, {"target_res", target_res}, {"target_weights", target_weights}};
}

EpochLog validate_model(models::Model& model, const DatasetView& view, const TrainConfig& cfg) {
  EvalOptions opt;
  opt.input_res = cfg.input_res;
  opt.batch = cfg.batch;
  const std::vector<EvalRow> rows = evaluate(model, view, cfg.target_res, opt);
  EpochLog log;
  log.validated = true;
  for (const EvalRow& r : rows) {
    if (!r.skipped.empty()) throw io::FormatError("validation: " + r.skipped);
    log.val_mae += r.mae / static_cast<double>(rows.size());
    log.val_mse += r.mse / static_cast<double>(rows.size());
    log.val_psnr += r.psnr / static_cast<double>(rows.size());
    log.val_ssim += r.ssim / static_cast<double>(rows.size());
  }
  return log;
}

TrainResult train(models::Model& model, const DatasetView& train_view, const DatasetView* val_view,
                  const TrainConfig& cfg, const TrainOutputs& outputs) {
  cfg.validate();
  if (train_view.size() == 0) throw io::FormatError("training split is empty");
  if (val_view && val_view->size() == 0) val_view = nullptr;
  const auto targets = square_targets(cfg.target_res);
  std::vector<double> weights = cfg.target_weights;
  if (weights.empty()) weights.assign(targets.size(), 1.0);

  nlohmann::json meta = outputs.meta;
  meta["train"] = cfg.to_json();
  meta["norm"] = {{"mean", train_view.norm().mean}, {"std", train_view.norm().std}};
  bool saved = false;
  auto save = [&](std::size_t epoch, double val_mse) {
    if (outputs.checkpoint.empty()) return;
    meta["epoch"] = epoch;
    meta["val_mse"] = val_mse;
    models::save_checkpoint(outputs.checkpoint, model, meta);
    saved = true;
  };

  std::ofstream log_out;
  if (!outputs.log_csv.empty()) {
    log_out.open(outputs.log_csv);
    if (!log_out) throw io::FormatError("cannot write " + outputs.log_csv.string());
    log_out << "epoch,steps,train_loss,val_mae,val_mse,val_psnr,val_ssim\n" << std::flush;
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_view.size());
  std::iota(order.begin(), order.end(), 0);
  ad::AdamConfig adam;
  adam.lr = cfg.lr;

  TrainResult result;
  result.best_val_mse = std::numeric_limits<double>::infinity();
  std::map<std::string, Tensor> best;
  bool stop = false;
  for (std::size_t epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(cfg.batch, order.size() - start));
      Graph g(true);
      const std::vector<Var> preds = model.forward_multi(g, g.constant(train_view.inputs(idx, cfg.input_res)), targets);
      Var total;
      for (std::size_t k = 0; k < preds.size(); ++k) {
        Var term = ad::scale(loss(cfg.loss, preds[k], g.constant(train_view.targets(idx, cfg.target_res[k]))), weights[k]);
        total = k == 0 ? term : ad::add(total, term);
      }
      const double value = total.value().item();
      if (!std::isfinite(value)) {
        if (!saved) save(epoch, std::numeric_limits<double>::quiet_NaN());
        throw NumericError("non-finite training loss at epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(result.steps + 1));
      }
      g.backward(total);
      ad::adam_step(model.params(), adam);
      loss_sum += value;
      ++batches;
      ++result.steps;
      if (cfg.max_steps > 0 && result.steps >= cfg.max_steps) {
        stop = true;
        break;
      }
    }
    EpochLog row;
    const bool last = stop || epoch == cfg.epochs;
    if (val_view && (epoch % cfg.eval_every == 0 || last)) {
      row = validate_model(model, *val_view, cfg);
      if (row.val_mse < result.best_val_mse) {
        result.best_val_mse = row.val_mse;
        result.best_epoch = epoch;
        best.clear();
        for (const auto& [name, p] : model.params()) best.emplace(name, p.value);
        save(epoch, row.val_mse);
      }
    }
    row.epoch = epoch;
    row.steps = result.steps;
    row.train_loss = loss_sum / static_cast<double>(std::max<std::size_t>(batches, 1));
    result.log.push_back(row);
    if (log_out.is_open()) {
      log_out << row.epoch << ',' << row.steps << ',' << fmt(row.train_loss);
      if (row.validated)
        log_out << ',' << fmt(row.val_mae) << ',' << fmt(row.val_mse) << ',' << fmt(row.val_psnr) << ','
                << fmt(row.val_ssim);
      else
        log_out << ",,,,";
      log_out << '\n' << std::flush;
    }
    adam.lr *= cfg.lr_decay;
  }
  if (!best.empty()) {
    for (auto& [name, v] : best) model.params().at(name).value = std::move(v);
  } else {
    result.best_epoch = result.log.back().epoch;
    save(result.best_epoch, std::numeric_limits<double>::quiet_NaN());
  }
  return result;
}

std::vector<EvalRow> evaluate(models::Model& model, const DatasetView& test, const std::vector<std::size_t>& resolutions,
                              const EvalOptions& options) {
  const std::string label = options.model_label.empty() ? models::variant_tag(model.spec().variant)
                                                        : options.model_label;
  std::vector<EvalRow> rows;
  std::vector<std::size_t> usable;
  for (std::size_t r : resolutions) {
    if (!test.has_resolution(r)) {
      EvalRow row;
      row.model = label;
      row.loss = options.loss_label;
      row.resolution = r;
      row.skipped = "resolution " + std::to_string(r) + " not in the dataset";
      rows.push_back(row);
    } else {
      usable.push_back(r);
    }
  }
  std::vector<MetricSum> sums;
  for (std::size_t k = 0; k < usable.size(); ++k) sums.emplace_back(test.norm(), test.channel_range());
  std::vector<std::string> failed(usable.size());
  const std::size_t batch = std::max<std::size_t>(1, options.batch);
  for (std::size_t start = 0; start < test.size(); start += batch) {
    const std::vector<std::size_t> idx = batch_indices(start, std::min(test.size(), start + batch));
    const Tensor x = test.inputs(idx, options.input_res);
    for (std::size_t k = 0; k < usable.size(); ++k) {
      if (!failed[k].empty()) continue;
      const std::size_t r = usable[k];
      Tensor pred;
      try {
        if (options.upsample_from) {
          Graph g;
          const Var base = model.forward(g, g.constant(x), *options.upsample_from, *options.upsample_from);
          pred = ad::interpolate(base, r, r, grid::ResampleMode::Bicubic, model.spec().boundary).value();
        } else {
          pred = model.predict(x, r, r);
        }
      } catch (const models::ModelError& e) {
        failed[k] = e.what();
        continue;
      } catch (const ad::AdError& e) {
        failed[k] = e.what();
        continue;
      }
      sums[k].add(pred, test.targets(idx, r));
    }
  }
  for (std::size_t k = 0; k < usable.size(); ++k) {
    EvalRow row = failed[k].empty() && test.size() > 0 ? sums[k].row() : EvalRow{};
    row.model = label;
    row.loss = options.loss_label;
    row.resolution = usable[k];
    if (!failed[k].empty()) row.skipped = failed[k];
    if (test.size() == 0) row.skipped = "empty test split";
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const EvalRow& a, const EvalRow& b) { return a.resolution < b.resolution; });
  return rows;
}

std::vector<EvalRow> evaluate_bicubic(const DatasetView& test, const std::vector<std::size_t>& resolutions,
                                      std::size_t input_res, grid::Boundary boundary) {
  if (test.temporal()) throw io::FormatError("bicubic baseline needs a static view");
  std::vector<EvalRow> rows;
  for (std::size_t r : resolutions) {
    EvalRow row;
    if (!test.has_resolution(r) || r < input_res) {
      row.skipped = "resolution " + std::to_string(r) + " unavailable";
    } else if (test.size() > 0) {
      MetricSum sum(test.norm(), test.channel_range());
      for (std::size_t start = 0; start < test.size(); start += 16) {
        const std::vector<std::size_t> idx = batch_indices(start, std::min(test.size(), start + 16));
        Graph g;
        const Var up = ad::interpolate(g.constant(test.inputs(idx, input_res)), r, r, grid::ResampleMode::Bicubic,
                                       boundary);
        sum.add(up.value(), test.targets(idx, r));
      }
      row = sum.row();
    }
    row.model = "bicubic";
    row.loss = "none";
    row.resolution = r;
    rows.push_back(row);
  }
  return rows;
}

void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRow>& rows,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::ofstream out(path);
  if (!out) throw io::FormatError("cannot write " + path.string());
  for (const auto& [k, v] : metadata) out << "# " << k << ": " << v << '\n';
  for (const EvalRow& r : rows)
    if (!r.skipped.empty()) out << "# skipped " << r.model << " at " << r.resolution << ": " << r.skipped << '\n';
  out << kEvalCsvHeader << '\n';
  for (const EvalRow& r : rows) {
    out << r.model << ',' << r.loss << ',' << r.resolution << ',';
    if (r.skipped.empty())
      out << fmt(r.mae) << ',' << fmt(r.mse) << ',' << fmt(r.psnr) << ',' << fmt(r.ssim) << ',' << r.n << '\n';
    else
      out << ",,,,0\n";
  }
}

}  // namespace arbires::train

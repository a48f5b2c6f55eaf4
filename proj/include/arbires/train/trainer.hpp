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

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "arbires/models/model.hpp"
#include "arbires/train/data.hpp"
#include "arbires/train/metrics.hpp"

namespace arbires::train {

/// Non-finite loss or prediction.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double lr = 1e-3;
  std::size_t epochs = 600;
  std::size_t batch = 16;
  LossKind loss = LossKind::L2;
  std::uint64_t seed = 0;
  /// Validate every k epochs (and after the last).
  std::size_t eval_every = 1;
  /// Stop after this many optimizer steps (0 = no cap).
  std::size_t max_steps = 0;
  /// Multiplied into lr after every epoch; 1 keeps it constant.
  double lr_decay = 1.0;
  std::size_t input_res = 0;
  /// Supervised output resolutions and their loss weights (default 1 each).
  std::vector<std::size_t> target_res;
  std::vector<double> target_weights;

  void validate() const;
  nlohmann::json to_json() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double train_loss = 0.0;
  double val_mae = 0.0;
  double val_mse = 0.0;
  double val_psnr = 0.0;
  double val_ssim = 0.0;
  bool validated = false;
};

struct TrainOutputs {
  /// Best-validation checkpoint (empty: keep in memory only).
  std::filesystem::path checkpoint;
  /// Append-only CSV of EpochLog rows (empty: none).
  std::filesystem::path log_csv;
  /// Extra checkpoint metadata (dataset id, normalisation, ...).
  nlohmann::json meta;
};

struct TrainResult {
  std::vector<EpochLog> log;
  std::size_t steps = 0;
  std::size_t best_epoch = 0;
  double best_val_mse = 0.0;
};

/// Adam over seeded shuffled mini-batches. When a validation view is given
/// the parameters with the lowest validation MSE are restored at the end
/// (and written to outputs.checkpoint); otherwise the final parameters are
/// kept. A non-finite loss throws NumericError after the last good
/// parameters have been checkpointed.
TrainResult train(models::Model& model, const DatasetView& train_view, const DatasetView* val_view,
                  const TrainConfig& cfg, const TrainOutputs& outputs = {});

struct EvalRow {
  std::string model;
  std::string loss;
  std::size_t resolution = 0;
  double mae = 0.0;
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  std::size_t n = 0;
  /// Non-empty when the row could not be computed.
  std::string skipped;
};

struct EvalOptions {
  std::size_t input_res = 0;
  std::size_t batch = 16;
  std::string model_label;
  std::string loss_label;
  /// Predict at this resolution and bicubic-interpolate to each target.
  std::optional<std::size_t> upsample_from;
};

/// Test-split metrics per resolution in physical units. Temporal metrics
/// average over every predicted frame.
std::vector<EvalRow> evaluate(models::Model& model, const DatasetView& test, const std::vector<std::size_t>& resolutions,
                              const EvalOptions& options);

/// Non-learned reference: bicubic interpolation of the input field.
std::vector<EvalRow> evaluate_bicubic(const DatasetView& test, const std::vector<std::size_t>& resolutions,
                                      std::size_t input_res, grid::Boundary boundary);

/// Metrics of the validation split at every target resolution, averaged.
EpochLog validate_model(models::Model& model, const DatasetView& view, const TrainConfig& cfg);

inline constexpr const char* kEvalCsvHeader = "model,loss,resolution,mae,mse,psnr,ssim,n";

/// `# key: value` metadata lines, the header, then one row per EvalRow.
void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRow>& rows,
                    const std::vector<std::pair<std::string, std::string>>& metadata = {});

}  // namespace arbires::train

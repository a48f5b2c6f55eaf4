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

#include <set>

#include "arbires/io/grd1.hpp"
#include "arbires/models/model.hpp"

namespace arbires::models {

namespace {

constexpr const char* kHeaderTag = "arbires.checkpoint";
constexpr double kCheckpointVersion = 1.0;

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, const nlohmann::json& meta) {
  std::vector<io::Grd1Record> recs;
  io::Grd1Record header;
  header.dims = {1};
  header.data = {kCheckpointVersion};
  header.names = {kHeaderTag, nlohmann::json{{"spec", model.spec().to_json()}, {"meta", meta}}.dump()};
  recs.push_back(std::move(header));
  for (const auto& [name, p] : model.params()) {
    io::Grd1Record r;
    const bool moments = p.trainable;
    r.dims = {moments ? 3u : 1u};
    for (std::size_t d : p.value.shape()) r.dims.push_back(d);
    r.names = {name, p.trainable ? "trainable" : "buffer", std::to_string(p.step)};
    r.data = p.value.storage();
    if (moments) {
      r.data.insert(r.data.end(), p.m.storage().begin(), p.m.storage().end());
      r.data.insert(r.data.end(), p.v.storage().begin(), p.v.storage().end());
    }
    recs.push_back(std::move(r));
  }
  io::write_grd1_file(path, recs);
}

Model load_checkpoint(const std::filesystem::path& path, nlohmann::json* meta) {
  const std::vector<io::Grd1Record> recs = io::read_grd1_all(path);
  if (recs.empty() || recs[0].names.size() != 2 || recs[0].names[0] != kHeaderTag)
    throw io::FormatError(path.string() + ": not a checkpoint");
  if (recs[0].data.size() != 1 || recs[0].data[0] != kCheckpointVersion)
    throw io::FormatError(path.string() + ": unsupported checkpoint version");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(recs[0].names[1]);
  } catch (const nlohmann::json::exception& e) {
    throw io::FormatError(path.string() + ": corrupt checkpoint header: " + e.what());
  }
  Model model(ModelSpec::from_json(header.at("spec")));
  if (meta) *meta = header.value("meta", nlohmann::json::object());

  std::set<std::string> seen;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const io::Grd1Record& r = recs[i];
    if (r.names.size() != 3 || r.dims.empty()) throw io::FormatError(path.string() + ": malformed parameter record");
    const std::string& name = r.names[0];
    if (!model.params().contains(name))
      throw io::FormatError(path.string() + ": parameter '" + name + "' does not belong to this model");
    ad::Param& p = model.params().at(name);
    const ad::Shape shape(r.dims.begin() + 1, r.dims.end());
    if (shape != p.value.shape() || (r.dims[0] != 1 && r.dims[0] != 3))
      throw io::FormatError(path.string() + ": parameter '" + name + "' has shape " + ad::shape_str(shape) +
                            ", model expects " + ad::shape_str(p.value.shape()));
    const std::size_t n = p.value.size();
    p.value = ad::Tensor(shape, std::vector<double>(r.data.begin(), r.data.begin() + n));
    if (r.dims[0] == 3) {
      p.m = ad::Tensor(shape, std::vector<double>(r.data.begin() + n, r.data.begin() + 2 * n));
      p.v = ad::Tensor(shape, std::vector<double>(r.data.begin() + 2 * n, r.data.end()));
    }
    p.step = std::stoull(r.names[2]);
    seen.insert(name);
  }
  if (seen.size() != model.params().size()) throw io::FormatError(path.string() + ": checkpoint is missing parameters");
  return model;
}

}  // namespace arbires::models

// Copyright 2026 The aw2v Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <sstream>

#include "aw2v/errors.hpp"
#include "aw2v/seq2seq.hpp"
#include "json.hpp"

namespace aw2v {

namespace {

constexpr int kCheckpointVersion = 1;

using Json = nlohmann::ordered_json;

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

double finite_number(const Json& j, const std::string& name) {
  if (!j.is_number()) throw FormatError("checkpoint tensor '" + name + "' has a non-number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError("checkpoint tensor '" + name + "' is not finite");
  return v;
}

void from_json(const Json& j, Matrix& m, const std::string& name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != m.rows()) {
    throw FormatError("checkpoint tensor '" + name + "' has wrong row count");
  }
  for (Index r = 0; r < m.rows(); ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<Index>(row.size()) != m.cols()) {
      throw FormatError("checkpoint tensor '" + name + "' has wrong column count");
    }
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = finite_number(row[c], name);
  }
}

void from_json(const Json& j, Vector& v, const std::string& name) {
  if (!j.is_array() || static_cast<Index>(j.size()) != v.size()) {
    throw FormatError("checkpoint tensor '" + name + "' has wrong length");
  }
  for (Index k = 0; k < v.size(); ++k) v[k] = finite_number(j[k], name);
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("checkpoint is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("checkpoint field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string checkpoint_json(const ModelParams& params) {
  params.check_shapes();
  Json doc;
  doc["version"] = kCheckpointVersion;
  doc["input_dim"] = params.input_dim;
  doc["hidden_dim"] = params.hidden_dim;
  doc["seed"] = params.seed;
  doc["epochs"] = params.epochs;
  Json training;
  training["learning_rate"] = params.training.learning_rate;
  training["denoise_p"] = params.training.denoise_p;
  training["clip_norm"] =
      params.training.clip_norm ? Json(*params.training.clip_norm) : Json(nullptr);
  doc["training"] = std::move(training);
  Json tensors = Json::object();
  visit_tensors(params, [&](std::string_view name, const auto& t) {
    tensors[std::string(name)] = to_json(t);
  });
  doc["params"] = std::move(tensors);
  return doc.dump() + "\n";
}

ModelParams checkpoint_from_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("malformed checkpoint: not an object");
  const int version = required<int>(doc, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto input_dim = required<Index>(doc, "input_dim");
  const auto hidden_dim = required<Index>(doc, "hidden_dim");
  if (input_dim < 1 || hidden_dim < 1) throw FormatError("checkpoint dimensions must be >= 1");

  ModelParams p = ModelParams::zeros(input_dim, hidden_dim);
  p.seed = required<std::uint64_t>(doc, "seed");
  p.epochs = required<int>(doc, "epochs");
  if (doc.contains("training")) {
    const Json& t = doc["training"];
    p.training.learning_rate = required<double>(t, "learning_rate");
    p.training.denoise_p = required<double>(t, "denoise_p");
    if (t.contains("clip_norm") && !t["clip_norm"].is_null()) {
      p.training.clip_norm = required<double>(t, "clip_norm");
    }
  }
  if (!doc.contains("params") || !doc["params"].is_object()) {
    throw FormatError("checkpoint is missing 'params'");
  }
  const Json& tensors = doc["params"];
  std::size_t seen = 0;
  visit_tensors(p, [&](std::string_view name, auto& t) {
    const std::string key(name);
    if (!tensors.contains(key)) throw FormatError("checkpoint is missing tensor '" + key + "'");
    from_json(tensors[key], t, key);
    ++seen;
  });
  if (seen != tensors.size()) throw FormatError("checkpoint has unexpected tensors");
  return p;
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  const std::string text = checkpoint_json(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write checkpoint " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace aw2v

/*
 * Copyright 2026 The radfall Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <nlohmann/json.hpp>

#include "core/dataio.hpp"
#include "core/training.hpp"

namespace radfall::model {

using nlohmann::json;

namespace {

json config_json(const HvraeConfig& c) {
  return json{{"length", c.length},
              {"points", c.points},
              {"dims", c.dims},
              {"latent", c.latent},
              {"encoder_hidden", c.encoder_hidden},
              {"decoder_hidden", c.decoder_hidden},
              {"rnn_hidden", c.rnn_hidden},
              {"loss_variant", to_string(c.variant)},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon},
              {"clip_norm", c.clip_norm},
              {"logvar_clamp", {c.logvar_min, c.logvar_max}},
              {"posterior_mean", c.posterior_mean},
              {"standardize", c.standardize}};
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("config key '") + key + "': " + e.what());
  }
}

HvraeConfig config_from(const json& j, HvraeConfig c) {
  require(j.is_object(), ErrorKind::Format, "model config must be a JSON object");
  static const char* known[] = {"length", "points", "dims", "latent", "encoder_hidden", "decoder_hidden",
                                "rnn_hidden", "loss_variant", "epochs", "batch_size", "seed", "learning_rate",
                                "beta1", "beta2", "epsilon", "clip_norm", "logvar_clamp", "posterior_mean",
                                "standardize"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    require(ok, ErrorKind::Format, "unknown model config key '" + item.key() + "'");
  }
  take(j, "length", c.length);
  take(j, "points", c.points);
  take(j, "dims", c.dims);
  take(j, "latent", c.latent);
  take(j, "encoder_hidden", c.encoder_hidden);
  take(j, "decoder_hidden", c.decoder_hidden);
  take(j, "rnn_hidden", c.rnn_hidden);
  if (j.contains("loss_variant")) {
    std::string v;
    take(j, "loss_variant", v);
    c.variant = loss_variant_from_string(v);
  }
  take(j, "epochs", c.epochs);
  take(j, "batch_size", c.batch_size);
  take(j, "seed", c.seed);
  take(j, "learning_rate", c.learning_rate);
  take(j, "beta1", c.beta1);
  take(j, "beta2", c.beta2);
  take(j, "epsilon", c.epsilon);
  take(j, "clip_norm", c.clip_norm);
  if (j.contains("logvar_clamp")) {
    std::vector<double> bounds;
    take(j, "logvar_clamp", bounds);
    require(bounds.size() == 2, ErrorKind::Format, "logvar_clamp must be [min, max]");
    c.logvar_min = bounds[0];
    c.logvar_max = bounds[1];
  }
  take(j, "posterior_mean", c.posterior_mean);
  take(j, "standardize", c.standardize);
  return c;
}

json tensor_json(const Matrix& m) {
  std::vector<double> values(m.data(), m.data() + m.size());
  return json{{"shape", {m.rows(), m.cols()}}, {"values", values}};
}

Matrix tensor_from(const json& j, const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  try {
    auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
    auto values = j.at("values").get<std::vector<double>>();
    require(shape.size() == 2 && shape[0] == rows && shape[1] == cols, ErrorKind::Format,
            "tensor '" + name + "' has shape incompatible with the config");
    require(static_cast<Eigen::Index>(values.size()) == rows * cols, ErrorKind::Format,
            "tensor '" + name + "' value count does not match its shape");
    return Eigen::Map<const Matrix>(values.data(), rows, cols);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, "tensor '" + name + "': " + e.what());
  }
}

}  // namespace

std::string config_to_json(const HvraeConfig& config) { return config_json(config).dump(2); }

HvraeConfig config_from_json(const std::string& text, const HvraeConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("model config: ") + e.what());
  }
  return config_from(j, base);
}

std::string weights_to_json(const HvraeModel& model) {
  json layers = json::object();
  for (const auto* p : model.parameters()) layers[p->name] = tensor_json(p->value);
  json cfg = config_json(model.config());
  cfg["input_offset"] = std::vector<double>(model.input_offset.data(), model.input_offset.data() + model.input_offset.size());
  cfg["input_scale"] = std::vector<double>(model.input_scale.data(), model.input_scale.data() + model.input_scale.size());
  json doc{{"version", kWeightsVersion},
           {"config", cfg},
           {"layers", layers},
           {"seed", model.seed},
           {"final_loss", model.final_loss}};
  return doc.dump() + "\n";
}

HvraeModel weights_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("weight file: ") + e.what());
  }
  require(doc.is_object() && doc.contains("version"), ErrorKind::Format, "weight file has no version field");
  require(doc["version"].is_number_integer() && doc["version"].get<int>() == kWeightsVersion, ErrorKind::Version,
          "unsupported weight file version " + doc["version"].dump() + " (expected " +
              std::to_string(kWeightsVersion) + ")");
  for (const char* key : {"config", "layers", "seed", "final_loss"})
    require(doc.contains(key), ErrorKind::Format, std::string("weight file is missing '") + key + "'");

  json cfg = doc["config"];
  std::vector<double> offset, scale;
  take(cfg, "input_offset", offset);
  take(cfg, "input_scale", scale);
  cfg.erase("input_offset");
  cfg.erase("input_scale");
  HvraeModel model(config_from(cfg, HvraeConfig{}));
  const auto dims = static_cast<std::size_t>(model.config().dims);
  if (!offset.empty() || !scale.empty()) {
    require(offset.size() == dims && scale.size() == dims, ErrorKind::Format, "input standardization has wrong length");
    for (std::size_t i = 0; i < dims; ++i) {
      model.input_offset(0, static_cast<Eigen::Index>(i)) = offset[i];
      model.input_scale(0, static_cast<Eigen::Index>(i)) = scale[i];
    }
  }
  const json& layers = doc["layers"];
  require(layers.is_object(), ErrorKind::Format, "'layers' must be an object");
  for (auto* p : model.parameters()) {
    require(layers.contains(p->name), ErrorKind::Format, "weight file is missing tensor '" + p->name + "'");
    p->value = tensor_from(layers[p->name], p->name, p->value.rows(), p->value.cols());
    p->zero_grad();
  }
  require(layers.size() == model.parameters().size(), ErrorKind::Format,
          "weight file holds tensors the config does not use");
  try {
    model.seed = doc["seed"].get<std::uint64_t>();
    model.final_loss = doc["final_loss"].get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("weight file metadata: ") + e.what());
  }
  return model;
}

void save_weights(const HvraeModel& model, const std::filesystem::path& path) {
  io::write_text_file(path, weights_to_json(model));
}

HvraeModel load_weights(const std::filesystem::path& path) { return weights_from_json(io::read_text_file(path)); }

}  // namespace radfall::model

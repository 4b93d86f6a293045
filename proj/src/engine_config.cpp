// Copyright 2026 The streamadapt Authors.
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

#include "streamadapt/engine_config.hpp"

#include <fstream>
#include <set>

#include "streamadapt/error.hpp"

namespace streamadapt {

using nlohmann::json;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::NoAcquire:
      return "no_acquire";
    case RunMode::Auf:
      return "auf";
    case RunMode::AufArc:
      return "auf_arc";
  }
  return "auf_arc";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "no_acquire") return RunMode::NoAcquire;
  if (name == "auf") return RunMode::Auf;
  if (name == "auf_arc") return RunMode::AufArc;
  throw DataError("unknown mode \"" + name +
                  "\" (expected no_acquire, auf or auf_arc)");
}

AcquisitionConfig EngineConfig::effective_acquisition() const {
  AcquisitionConfig acq = acquisition;
  acq.arc_enabled = arc_enabled();
  return acq;
}

void EngineConfig::validate() const {
  acquisition.validate();
  augment.validate();
  if (alpha1 < 0.0 || alpha1 > 1.0) {
    throw DataError("config: alpha1 must be in [0, 1]");
  }
  if (alpha2 < 0.0 || alpha2 > 1.0) {
    throw DataError("config: alpha2 must be in [0, 1]");
  }
  if (confidence_threshold < 0.0 || confidence_threshold > 1.0) {
    throw DataError("config: confidence_threshold must be in [0, 1]");
  }
  if (learning_rate <= 0.0 || warmup_learning_rate <= 0.0) {
    throw DataError("config: learning rates must be positive");
  }
  if (model.feature_dim == 0 || model.embedding_dim == 0 ||
      model.num_categories == 0) {
    throw DataError("config: model dimensions must be positive");
  }
}

json EngineConfig::to_json() const {
  json j;
  j["mode"] = to_string(mode);
  j["gamma"] = acquisition.gamma;
  j["warmup_min_total"] = acquisition.warmup_min_total;
  j["warmup_min_ratio"] = acquisition.warmup_min_ratio;
  j["freeze_rare_category"] = acquisition.freeze_rare_category;
  j["alpha1"] = alpha1;
  j["alpha2"] = alpha2;
  j["confidence_threshold"] = confidence_threshold;
  j["learning_rate"] = learning_rate;
  j["warmup_learning_rate"] = warmup_learning_rate;
  j["reverse_kl"] = reverse_kl;
  j["feature_dim"] = model.feature_dim;
  j["embedding_dim"] = model.embedding_dim;
  j["num_categories"] = model.num_categories;
  j["encoder_seed"] = model.encoder_seed;
  j["weak_sigma"] = augment.weak_sigma;
  j["strong_sigma"] = augment.strong_sigma;
  j["strong_mask_prob"] = augment.strong_mask_prob;
  j["rng_seed"] = augment.rng_seed;
  if (!stream_path.empty()) j["stream"] = stream_path;
  if (!checkpoint_in.empty()) j["checkpoint_in"] = checkpoint_in;
  if (!checkpoint_out.empty()) j["checkpoint_out"] = checkpoint_out;
  if (!output_path.empty()) j["output"] = output_path;
  return j;
}

EngineConfig EngineConfig::from_json(const json& j) {
  if (!j.is_object()) {
    throw DataError("config must be a JSON object");
  }
  static const std::set<std::string> known = {
      "mode",          "gamma",          "warmup_min_total",
      "warmup_min_ratio", "freeze_rare_category", "alpha1",
      "alpha2",        "confidence_threshold",   "learning_rate",
      "warmup_learning_rate", "reverse_kl",      "feature_dim",
      "embedding_dim", "num_categories", "encoder_seed",
      "weak_sigma",    "strong_sigma",   "strong_mask_prob",
      "rng_seed",      "stream",         "checkpoint_in",
      "checkpoint_out", "output"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.contains(key)) {
      throw DataError("config: unknown field \"" + key + "\"");
    }
  }

  EngineConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      using T = std::decay_t<decltype(field)>;
      try {
        field = j.at(key).get<T>();
      } catch (const json::exception&) {
        throw DataError(std::string("config: field \"") + key +
                        "\" has the wrong type");
      }
    }
  };

  if (j.contains("mode")) {
    if (!j["mode"].is_string()) {
      throw DataError("config: field \"mode\" must be a string");
    }
    cfg.mode = run_mode_from_string(j["mode"].get<std::string>());
  }
  get("gamma", cfg.acquisition.gamma);
  get("warmup_min_total", cfg.acquisition.warmup_min_total);
  get("warmup_min_ratio", cfg.acquisition.warmup_min_ratio);
  get("freeze_rare_category", cfg.acquisition.freeze_rare_category);
  get("alpha1", cfg.alpha1);
  get("alpha2", cfg.alpha2);
  get("confidence_threshold", cfg.confidence_threshold);
  get("learning_rate", cfg.learning_rate);
  get("warmup_learning_rate", cfg.warmup_learning_rate);
  get("reverse_kl", cfg.reverse_kl);
  get("feature_dim", cfg.model.feature_dim);
  get("embedding_dim", cfg.model.embedding_dim);
  get("num_categories", cfg.model.num_categories);
  get("encoder_seed", cfg.model.encoder_seed);
  get("weak_sigma", cfg.augment.weak_sigma);
  get("strong_sigma", cfg.augment.strong_sigma);
  get("strong_mask_prob", cfg.augment.strong_mask_prob);
  get("rng_seed", cfg.augment.rng_seed);
  get("stream", cfg.stream_path);
  get("checkpoint_in", cfg.checkpoint_in);
  get("checkpoint_out", cfg.checkpoint_out);
  get("output", cfg.output_path);

  cfg.validate();
  return cfg;
}

EngineConfig EngineConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open config file: " + path);
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw DataError("config file is not valid JSON: " + path);
  }
  return from_json(j);
}

}  // namespace streamadapt

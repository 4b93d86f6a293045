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

#ifndef STREAMADAPT_ENGINE_CONFIG_HPP_
#define STREAMADAPT_ENGINE_CONFIG_HPP_

#include <string>

#include <json.hpp>

#include "streamadapt/acquisition.hpp"
#include "streamadapt/toy_detector.hpp"

namespace streamadapt {

/// NoAcquire adapts on every frame (selection bypassed); Auf runs
/// first-stage selection only; AufArc adds the rare-category second stage.
enum class RunMode { NoAcquire, Auf, AufArc };

const char* to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

/// Full engine configuration with validated defaults. Loaded from a flat
/// JSON object; unknown keys are rejected with the offending name.
struct EngineConfig {
  RunMode mode = RunMode::AufArc;

  AcquisitionConfig acquisition;

  double alpha1 = 0.996;
  double alpha2 = 0.9;
  double confidence_threshold = 0.9;
  double learning_rate = 0.001;
  double warmup_learning_rate = 0.0001;
  bool reverse_kl = false;

  ToyDetectorConfig model;
  AugmentConfig augment;

  // Optional paths; command-line flags override these.
  std::string stream_path;
  std::string checkpoint_in;
  std::string checkpoint_out;
  std::string output_path;

  /// arc_enabled derived from mode.
  bool arc_enabled() const { return mode == RunMode::AufArc; }

  /// Acquisition config with arc_enabled synced to the run mode.
  AcquisitionConfig effective_acquisition() const;

  /// Throws DataError naming the invalid field.
  void validate() const;

  nlohmann::json to_json() const;
  static EngineConfig from_json(const nlohmann::json& j);
  static EngineConfig load_file(const std::string& path);
};

}  // namespace streamadapt

#endif  // STREAMADAPT_ENGINE_CONFIG_HPP_

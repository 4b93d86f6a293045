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

#ifndef STREAMADAPT_SIM_HARNESS_HPP_
#define STREAMADAPT_SIM_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamadapt/engine_config.hpp"
#include "streamadapt/frame.hpp"
#include "streamadapt/model.hpp"
#include "streamadapt/toy_detector.hpp"

namespace streamadapt {

/// Parameterization of a synthetic target stream with controllable domain
/// shift, temporal redundancy and class imbalance. Frames are per-category
/// Gaussian draws; with probability redundancy_rho the next frame is a
/// jittered repeat of the current one.
struct StreamSpec {
  std::size_t num_categories = 4;
  std::size_t feature_dim = 16;
  std::vector<double> class_frequencies;
  std::vector<std::vector<double>> source_means;
  std::vector<std::vector<double>> target_means;
  double class_sigma = 0.05;
  double redundancy_rho = 0.9;
  double jitter_sigma = 0.01;
  std::size_t length = 5000;
  std::uint64_t rng_seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static StreamSpec from_json(const nlohmann::json& j);
};

/// A generated frame with its ground-truth category. The category exists
/// for evaluation only; the engine receives the bare Frame.
struct LabeledFrame {
  Frame frame;
  int category = 0;
};

std::vector<LabeledFrame> generate_stream(const StreamSpec& spec);

/// Fixed evaluation set drawn once per (spec, seed); balanced across
/// categories.
struct EvalSet {
  std::vector<std::vector<double>> features;
  std::vector<int> categories;
};

EvalSet make_eval_set(const StreamSpec& spec, bool target_domain,
                      std::size_t per_category, std::uint64_t seed);

double evaluate_accuracy(const ToyDetector& model, const ModelParams& params,
                         const EvalSet& eval);

/// Trains the toy classifier on labeled source-domain draws until it
/// reaches at least 95% held-out source accuracy. Throws PretrainError
/// when the stream spec is too hard for a linear model and DataError when
/// steps == 0.
struct PretrainResult {
  ModelParams params;
  double source_accuracy = 0.0;
};

PretrainResult pretrain_source(const StreamSpec& spec, std::size_t steps,
                               const ToyDetector& model);
PretrainResult pretrain_source(const StreamSpec& spec, std::size_t steps);

/// Outcome of one full online run.
struct RunReport {
  RunMode mode = RunMode::Auf;
  std::size_t frames_total = 0;
  std::size_t keyframes_total = 0;
  std::size_t keyframes_auf = 0;
  std::size_t keyframes_arc = 0;
  /// Ground-truth category of each keyframe; empty when truth is unknown
  /// (file streams).
  std::vector<std::size_t> keyframes_per_category;
  std::optional<double> target_accuracy_before;
  std::optional<double> target_accuracy_after;
  double per_frame_micros_mean = 0.0;
  std::size_t clusters_auf = 0;
  std::size_t clusters_arc = 0;

  nlohmann::json to_json() const;
};

/// Runs the full online loop over a generated stream, evaluating target
/// accuracy before and after (the final blend is applied before the
/// after-evaluation). Wall time per frame covers the loop only, not the
/// evaluations.
RunReport run_mode(RunMode mode, const std::vector<LabeledFrame>& stream,
                   const ModelParams& source_params, const EngineConfig& config,
                   const StreamSpec& spec);

/// A stream spec plus the engine configuration it is meant to run with.
struct SimulationSpec {
  StreamSpec stream;
  EngineConfig engine;
  std::size_t pretrain_steps = 300;
  /// Multiplies the pretrained logits; values > 1 model a systematically
  /// overconfident teacher without changing its decisions.
  double teacher_sharpness = 1.0;

  void validate() const;
  nlohmann::json to_json() const;
  static SimulationSpec from_json(const nlohmann::json& j);
  static SimulationSpec load_file(const std::string& path);
};

/// Bundled specs: "reference" (imbalanced, redundant, moderate shift) and
/// "adversarial" (heavy redundancy driving self-training drift when every
/// frame is used). Returns nullopt for unknown names.
std::optional<SimulationSpec> builtin_simulation_spec(const std::string& name);

/// Mean and sample standard deviation over seeds.
struct SeedStat {
  double mean = 0.0;
  double stddev = 0.0;
};

struct ModeStats {
  RunMode mode = RunMode::Auf;
  SeedStat accuracy_before;
  SeedStat accuracy_after;
  SeedStat keyframes;
  SeedStat rare_keyframes;
  SeedStat per_frame_micros;
  std::vector<RunReport> runs;
};

struct AblationResult {
  std::vector<std::uint64_t> seeds;
  int rare_truth_category = 0;
  std::vector<ModeStats> rows;  // NoAcquire, Auf, AufArc

  nlohmann::json to_json() const;
};

/// Runs all three modes over the given seeds. Each seed re-derives the
/// stream, the pretrained source model and the evaluation sets, so every
/// mode sees identical inputs for a given seed. Requires at least 5 seeds.
AblationResult ablation_compare(const SimulationSpec& spec,
                                const std::vector<std::uint64_t>& seeds);

/// Aligned plain-text rendering of the ablation table.
std::string format_ablation_table(const AblationResult& result);

}  // namespace streamadapt

#endif  // STREAMADAPT_SIM_HARNESS_HPP_

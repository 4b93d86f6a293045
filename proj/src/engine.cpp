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

#include "streamadapt/engine.hpp"

#include "streamadapt/error.hpp"

namespace streamadapt {

OnlineEngine::OnlineEngine(const EngineConfig& config, const AdaptableModel& model,
                           ModelParams source_params)
    : config_(config),
      model_(model),
      pair_(std::move(source_params), model.encoder_params(), config.alpha1,
            config.alpha2, config.confidence_threshold),
      acquisition_(model.embedding_dim(), model.num_categories()),
      augmenter_(config.augment) {
  config_.validate();
  if (pair_.teacher().size() != model_.param_count()) {
    throw DimensionError("engine: source checkpoint has " +
                         std::to_string(pair_.teacher().size()) +
                         " parameters, model expects " +
                         std::to_string(model_.param_count()));
  }
}

std::vector<Detection> OnlineEngine::pseudo_labels(const Frame& frame) const {
  if (frame.detections.has_value()) {
    return filter_pseudo_labels(*frame.detections, config_.confidence_threshold);
  }
  const Prediction pred = model_.predict(pair_.teacher(), frame.features);
  return filter_pseudo_labels(pred.detections(), config_.confidence_threshold);
}

FrameOutcome OnlineEngine::process(const Frame& frame) {
  validate_frame(frame, model_.feature_dim());
  ++frames_seen_;

  FrameOutcome outcome;
  const KlDirection kl = config_.reverse_kl ? KlDirection::TeacherToStudent
                                            : KlDirection::StudentToTeacher;

  if (config_.mode == RunMode::NoAcquire) {
    // Selection bypassed: every frame updates the model at the main rate.
    outcome.decision.keyframe = true;
    outcome.adapt = pair_.adapt_on_keyframe(model_, frame, config_.learning_rate,
                                            augmenter_, kl);
    ++keyframes_total_;
    return outcome;
  }

  const std::vector<Detection> labels = pseudo_labels(frame);
  const std::vector<double> embedding = model_.encode(frame.features);
  outcome.decision =
      acquisition_.process_frame(embedding, labels, config_.effective_acquisition());

  if (outcome.decision.keyframe) {
    const double lr = acquisition_.warmup_done() ? config_.learning_rate
                                                 : config_.warmup_learning_rate;
    outcome.adapt = pair_.adapt_on_keyframe(model_, frame, lr, augmenter_, kl);
    ++keyframes_total_;
    if (outcome.decision.source == KeyframeSource::Auf) {
      ++keyframes_auf_;
    } else if (outcome.decision.source == KeyframeSource::Arc) {
      ++keyframes_arc_;
    }
  }
  return outcome;
}

}  // namespace streamadapt

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

#ifndef STREAMADAPT_ENGINE_HPP_
#define STREAMADAPT_ENGINE_HPP_

#include <optional>
#include <vector>

#include "streamadapt/acquisition.hpp"
#include "streamadapt/engine_config.hpp"
#include "streamadapt/mean_teacher.hpp"
#include "streamadapt/model.hpp"
#include "streamadapt/toy_detector.hpp"

namespace streamadapt {

struct FrameOutcome {
  AcquisitionDecision decision;
  std::optional<AdaptReport> adapt;
};

/// Sequential online loop shared by the CLI and the simulation harness:
/// per frame, pseudo-labels from the teacher (or from the stream when
/// supplied), the acquisition decision, and the keyframe update. The
/// learning rate switches from the warm-up rate to the main rate once the
/// pseudo-label statistics stabilize; NoAcquire mode bypasses acquisition
/// and adapts on every frame at the main rate.
class OnlineEngine {
 public:
  /// `model` is borrowed and must outlive the engine.
  OnlineEngine(const EngineConfig& config, const AdaptableModel& model,
               ModelParams source_params);

  /// Processes the next frame. Frames must arrive in stream order; the
  /// decision for frame t completes before frame t+1 is admitted.
  FrameOutcome process(const Frame& frame);

  /// Pseudo-labels the engine would use for this frame: the stream's own
  /// detections when present, else the teacher's prediction on the raw
  /// features; confidence-filtered either way.
  std::vector<Detection> pseudo_labels(const Frame& frame) const;

  ModelParams finalized_params() const { return pair_.finalize(); }

  const AcquisitionState& acquisition() const { return acquisition_; }
  const TeacherStudentPair& pair() const { return pair_; }
  const EngineConfig& config() const { return config_; }
  std::size_t frames_seen() const { return frames_seen_; }
  std::size_t keyframes_total() const { return keyframes_total_; }
  std::size_t keyframes_auf() const { return keyframes_auf_; }
  std::size_t keyframes_arc() const { return keyframes_arc_; }

 private:
  EngineConfig config_;
  const AdaptableModel& model_;
  TeacherStudentPair pair_;
  AcquisitionState acquisition_;
  GaussianAugmenter augmenter_;
  std::size_t frames_seen_ = 0;
  std::size_t keyframes_total_ = 0;
  std::size_t keyframes_auf_ = 0;
  std::size_t keyframes_arc_ = 0;
};

}  // namespace streamadapt

#endif  // STREAMADAPT_ENGINE_HPP_

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

#ifndef STREAMADAPT_MODEL_HPP_
#define STREAMADAPT_MODEL_HPP_

#include <span>
#include <vector>

#include "streamadapt/frame.hpp"

namespace streamadapt {

/// Flat vector of all trainable parameters of a model.
using ModelParams = std::vector<double>;

/// Per-slot class distributions produced by a model, plus the detections
/// derived from them (argmax category, max-probability confidence).
struct Prediction {
  std::vector<std::vector<double>> slot_distributions;

  std::vector<Detection> detections() const;
};

/// A loss value with its gradient w.r.t. the flat parameter vector.
struct LossGrad {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Direction of the student/teacher alignment divergence.
enum class KlDirection { StudentToTeacher, TeacherToStudent };

/// Behavioral contract for any model plugged into the adaptation loop.
/// Implementations must be pure functions of (params, inputs); the encoder
/// is fixed at construction and never trained.
class AdaptableModel {
 public:
  virtual ~AdaptableModel() = default;

  virtual std::size_t feature_dim() const = 0;
  virtual std::size_t embedding_dim() const = 0;
  virtual std::size_t num_categories() const = 0;
  virtual std::size_t param_count() const = 0;

  /// Frozen-encoder embedding of raw features; deterministic for all time.
  virtual std::vector<double> encode(std::span<const double> features) const = 0;

  /// Flattened copy of the frozen encoder parameters.
  virtual std::vector<double> encoder_params() const = 0;

  /// Per-slot probability distributions (each sums to 1 within 1e-9).
  virtual Prediction predict(const ModelParams& params,
                             std::span<const double> features) const = 0;

  /// Classification distributions entering the alignment term; same slot
  /// layout as predict().
  virtual std::vector<std::vector<double>> classification_distributions(
      const ModelParams& params, std::span<const double> features) const = 0;

  /// Supervised task loss against pseudo-labels, with gradient w.r.t. the
  /// flat parameter vector. `labels` must be non-empty.
  virtual LossGrad task_loss_and_gradient(
      const ModelParams& params, std::span<const double> features,
      const std::vector<Detection>& labels) const = 0;

  /// Alignment divergence between this model's distributions and the given
  /// (constant) teacher distributions, with gradient w.r.t. params.
  virtual LossGrad alignment_loss_and_gradient(
      const ModelParams& params, std::span<const double> features,
      const std::vector<std::vector<double>>& teacher_distributions,
      KlDirection direction) const = 0;
};

/// Weak/strong input augmentation used by the adaptation loop. Stateful:
/// draws consume the implementation's seeded stream.
class Augmenter {
 public:
  virtual ~Augmenter() = default;
  virtual std::vector<double> weak(std::span<const double> features) = 0;
  virtual std::vector<double> strong(std::span<const double> features) = 0;
};

}  // namespace streamadapt

#endif  // STREAMADAPT_MODEL_HPP_

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

#ifndef STREAMADAPT_TOY_DETECTOR_HPP_
#define STREAMADAPT_TOY_DETECTOR_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "streamadapt/model.hpp"

namespace streamadapt {

struct ToyDetectorConfig {
  std::size_t feature_dim = 16;
  std::size_t embedding_dim = 16;
  std::size_t num_categories = 4;
  std::uint64_t encoder_seed = 0;
};

/// Reference model: a frozen linear encoder followed by a trainable
/// linear-softmax classifier with a single detection slot. The encoder is
/// the identity when embedding_dim == feature_dim, otherwise a fixed
/// seeded random projection established at construction.
///
/// Parameter layout: the weight matrix (num_categories x embedding_dim)
/// row-major, then the bias vector (num_categories).
class ToyDetector final : public AdaptableModel {
 public:
  explicit ToyDetector(const ToyDetectorConfig& config);

  std::size_t feature_dim() const override { return config_.feature_dim; }
  std::size_t embedding_dim() const override { return config_.embedding_dim; }
  std::size_t num_categories() const override { return config_.num_categories; }
  std::size_t param_count() const override;

  ModelParams zero_params() const;

  std::vector<double> encode(std::span<const double> features) const override;
  std::vector<double> encoder_params() const override;
  Prediction predict(const ModelParams& params,
                     std::span<const double> features) const override;
  std::vector<std::vector<double>> classification_distributions(
      const ModelParams& params, std::span<const double> features) const override;
  LossGrad task_loss_and_gradient(const ModelParams& params,
                                  std::span<const double> features,
                                  const std::vector<Detection>& labels) const override;
  LossGrad alignment_loss_and_gradient(
      const ModelParams& params, std::span<const double> features,
      const std::vector<std::vector<double>>& teacher_distributions,
      KlDirection direction) const override;

 private:
  std::vector<double> softmax_over_embedding(const ModelParams& params,
                                             std::span<const double> embedding) const;
  void check_params(const ModelParams& params) const;

  ToyDetectorConfig config_;
  bool identity_encoder_;
  // Row-major (embedding_dim x feature_dim); empty when identity.
  std::vector<double> encoder_matrix_;
};

struct AugmentConfig {
  double weak_sigma = 0.01;
  double strong_sigma = 0.1;
  double strong_mask_prob = 0.2;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

enum class AugmentMode { Weak, Strong };

/// Additive Gaussian noise; strong mode additionally zeroes each output
/// coordinate independently with probability strong_mask_prob. A zero
/// sigma (or zero mask probability) consumes no draws for that pass.
std::vector<double> augment(std::span<const double> features,
                            const AugmentConfig& config, AugmentMode mode,
                            std::mt19937_64& rng);

/// Augmenter backed by augment() with a self-owned seeded stream.
class GaussianAugmenter final : public Augmenter {
 public:
  explicit GaussianAugmenter(const AugmentConfig& config)
      : config_(config), rng_(config.rng_seed) {}

  std::vector<double> weak(std::span<const double> features) override {
    return augment(features, config_, AugmentMode::Weak, rng_);
  }
  std::vector<double> strong(std::span<const double> features) override {
    return augment(features, config_, AugmentMode::Strong, rng_);
  }

 private:
  AugmentConfig config_;
  std::mt19937_64 rng_;
};

}  // namespace streamadapt

#endif  // STREAMADAPT_TOY_DETECTOR_HPP_

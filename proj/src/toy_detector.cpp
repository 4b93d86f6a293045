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

#include "streamadapt/toy_detector.hpp"

#include <algorithm>
#include <cmath>

#include "streamadapt/error.hpp"
#include "streamadapt/mean_teacher.hpp"

namespace streamadapt {

namespace {

constexpr double kDistributionFloor = 1e-12;

std::vector<double> floor_and_renormalize(std::span<const double> dist) {
  std::vector<double> out(dist.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out[i] = std::clamp(dist[i], kDistributionFloor, 1.0);
    sum += out[i];
  }
  for (double& v : out) {
    v /= sum;
  }
  return out;
}

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw DataError(std::string("toy detector: non-finite ") + what);
    }
  }
}

}  // namespace

ToyDetector::ToyDetector(const ToyDetectorConfig& config)
    : config_(config),
      identity_encoder_(config.embedding_dim == config.feature_dim) {
  if (config_.feature_dim == 0 || config_.embedding_dim == 0 ||
      config_.num_categories == 0) {
    throw DimensionError("toy detector: all dimensions must be positive");
  }
  if (!identity_encoder_) {
    // Fixed seeded projection, never trained. Entries scaled so embedding
    // norms track feature norms.
    std::mt19937_64 rng(config_.encoder_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(config_.feature_dim));
    encoder_matrix_.resize(config_.embedding_dim * config_.feature_dim);
    for (double& w : encoder_matrix_) {
      w = gauss(rng) * scale;
    }
  }
}

std::size_t ToyDetector::param_count() const {
  return config_.num_categories * config_.embedding_dim + config_.num_categories;
}

ModelParams ToyDetector::zero_params() const {
  return ModelParams(param_count(), 0.0);
}

std::vector<double> ToyDetector::encode(std::span<const double> features) const {
  if (features.size() != config_.feature_dim) {
    throw DimensionError("encode: feature dimension " + std::to_string(features.size()) +
                         ", expected " + std::to_string(config_.feature_dim));
  }
  if (identity_encoder_) {
    return std::vector<double>(features.begin(), features.end());
  }
  std::vector<double> embedding(config_.embedding_dim, 0.0);
  for (std::size_t i = 0; i < config_.embedding_dim; ++i) {
    const double* row = encoder_matrix_.data() + i * config_.feature_dim;
    double acc = 0.0;
    for (std::size_t j = 0; j < config_.feature_dim; ++j) {
      acc += row[j] * features[j];
    }
    embedding[i] = acc;
  }
  return embedding;
}

std::vector<double> ToyDetector::encoder_params() const {
  if (identity_encoder_) {
    // Identity written out explicitly so callers can snapshot it.
    std::vector<double> eye(config_.feature_dim * config_.feature_dim, 0.0);
    for (std::size_t i = 0; i < config_.feature_dim; ++i) {
      eye[i * config_.feature_dim + i] = 1.0;
    }
    return eye;
  }
  return encoder_matrix_;
}

void ToyDetector::check_params(const ModelParams& params) const {
  if (params.size() != param_count()) {
    throw DimensionError("toy detector: parameter vector of length " +
                         std::to_string(params.size()) + ", expected " +
                         std::to_string(param_count()));
  }
}

std::vector<double> ToyDetector::softmax_over_embedding(
    const ModelParams& params, std::span<const double> embedding) const {
  const std::size_t C = config_.num_categories;
  const std::size_t E = config_.embedding_dim;
  const double* bias = params.data() + C * E;

  std::vector<double> logits(C);
  for (std::size_t c = 0; c < C; ++c) {
    const double* row = params.data() + c * E;
    double acc = bias[c];
    for (std::size_t j = 0; j < E; ++j) {
      acc += row[j] * embedding[j];
    }
    logits[c] = acc;
  }

  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  std::vector<double> probs(C);
  for (std::size_t c = 0; c < C; ++c) {
    probs[c] = std::exp(logits[c] - max_logit);
    sum += probs[c];
  }
  for (double& p : probs) {
    p /= sum;
  }
  return probs;
}

Prediction ToyDetector::predict(const ModelParams& params,
                                std::span<const double> features) const {
  check_params(params);
  check_finite(features, "input");
  const std::vector<double> embedding = encode(features);
  Prediction prediction;
  prediction.slot_distributions.push_back(softmax_over_embedding(params, embedding));
  return prediction;
}

std::vector<std::vector<double>> ToyDetector::classification_distributions(
    const ModelParams& params, std::span<const double> features) const {
  check_params(params);
  check_finite(features, "input");
  const std::vector<double> embedding = encode(features);
  return {softmax_over_embedding(params, embedding)};
}

LossGrad ToyDetector::task_loss_and_gradient(const ModelParams& params,
                                             std::span<const double> features,
                                             const std::vector<Detection>& labels) const {
  check_params(params);
  if (labels.empty()) {
    throw DataError("task_loss_and_gradient: labels must be non-empty");
  }
  const std::size_t C = config_.num_categories;
  const std::size_t E = config_.embedding_dim;
  for (const Detection& label : labels) {
    if (label.category < 0 || static_cast<std::size_t>(label.category) >= C) {
      throw DataError("task_loss_and_gradient: label category out of range");
    }
  }

  const std::vector<double> embedding = encode(features);
  const std::vector<double> probs = softmax_over_embedding(params, embedding);

  // Mean cross-entropy over labels; the target is the average of the
  // labels' one-hot vectors, so dL/dlogits = p - q.
  std::vector<double> target(C, 0.0);
  double loss = 0.0;
  const double inv_labels = 1.0 / static_cast<double>(labels.size());
  for (const Detection& label : labels) {
    const auto c = static_cast<std::size_t>(label.category);
    target[c] += inv_labels;
    loss -= inv_labels * std::log(std::max(probs[c], kDistributionFloor));
  }

  LossGrad result;
  result.loss = loss;
  result.gradient.assign(param_count(), 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    const double dlogit = probs[c] - target[c];
    double* wrow = result.gradient.data() + c * E;
    for (std::size_t j = 0; j < E; ++j) {
      wrow[j] = dlogit * embedding[j];
    }
    result.gradient[C * E + c] = dlogit;
  }
  return result;
}

LossGrad ToyDetector::alignment_loss_and_gradient(
    const ModelParams& params, std::span<const double> features,
    const std::vector<std::vector<double>>& teacher_distributions,
    KlDirection direction) const {
  check_params(params);
  if (teacher_distributions.size() != 1) {
    throw DimensionError("toy detector has a single detection slot");
  }
  const std::size_t C = config_.num_categories;
  if (teacher_distributions[0].size() != C) {
    throw DimensionError("alignment: teacher distribution support mismatch");
  }

  const std::vector<double> embedding = encode(features);
  const std::vector<double> s =
      floor_and_renormalize(softmax_over_embedding(params, embedding));
  const std::vector<double> t = floor_and_renormalize(teacher_distributions[0]);

  LossGrad result;
  result.gradient.assign(param_count(), 0.0);

  std::vector<double> dlogits(C, 0.0);
  if (direction == KlDirection::StudentToTeacher) {
    // KL(s||t): dKL/dz_j = s_j * (ln(s_j/t_j) - KL).
    double kl = 0.0;
    for (std::size_t k = 0; k < C; ++k) {
      kl += s[k] * std::log(s[k] / t[k]);
    }
    result.loss = std::max(kl, 0.0);
    for (std::size_t j = 0; j < C; ++j) {
      dlogits[j] = s[j] * (std::log(s[j] / t[j]) - kl);
    }
  } else {
    // KL(t||s): dKL/dz_j = s_j - t_j.
    double kl = 0.0;
    for (std::size_t k = 0; k < C; ++k) {
      kl += t[k] * std::log(t[k] / s[k]);
    }
    result.loss = std::max(kl, 0.0);
    for (std::size_t j = 0; j < C; ++j) {
      dlogits[j] = s[j] - t[j];
    }
  }

  const std::size_t E = config_.embedding_dim;
  for (std::size_t c = 0; c < C; ++c) {
    double* wrow = result.gradient.data() + c * E;
    for (std::size_t j = 0; j < E; ++j) {
      wrow[j] = dlogits[c] * embedding[j];
    }
    result.gradient[C * E + c] = dlogits[c];
  }
  return result;
}

void AugmentConfig::validate() const {
  if (weak_sigma < 0.0 || strong_sigma < 0.0) {
    throw DataError("augment config: sigmas must be >= 0");
  }
  if (strong_mask_prob < 0.0 || strong_mask_prob >= 1.0) {
    throw DataError("augment config: strong_mask_prob must be in [0, 1)");
  }
}

std::vector<double> augment(std::span<const double> features,
                            const AugmentConfig& config, AugmentMode mode,
                            std::mt19937_64& rng) {
  std::vector<double> out(features.begin(), features.end());
  const double sigma =
      mode == AugmentMode::Weak ? config.weak_sigma : config.strong_sigma;
  if (sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& v : out) {
      v += gauss(rng);
    }
  }
  if (mode == AugmentMode::Strong && config.strong_mask_prob > 0.0) {
    std::bernoulli_distribution mask(config.strong_mask_prob);
    for (double& v : out) {
      if (mask(rng)) {
        v = 0.0;
      }
    }
  }
  return out;
}

}  // namespace streamadapt

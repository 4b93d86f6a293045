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

#include "streamadapt/mean_teacher.hpp"

#include <algorithm>
#include <cmath>

#include "streamadapt/error.hpp"

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

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace

std::vector<Detection> filter_pseudo_labels(const std::vector<Detection>& predictions,
                                            double threshold) {
  std::vector<Detection> kept;
  for (const Detection& d : predictions) {
    if (d.confidence > threshold) {
      kept.push_back(d);
    }
  }
  return kept;
}

double kl_alignment_loss(std::span<const double> student_dist,
                         std::span<const double> teacher_dist) {
  if (student_dist.size() != teacher_dist.size()) {
    throw DimensionError("kl_alignment_loss: distribution supports differ");
  }
  if (student_dist.empty()) {
    throw DataError("kl_alignment_loss: empty distribution");
  }
  const std::vector<double> s = floor_and_renormalize(student_dist);
  const std::vector<double> t = floor_and_renormalize(teacher_dist);
  double kl = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    kl += s[k] * std::log(s[k] / t[k]);
  }
  return std::max(kl, 0.0);
}

double kl_alignment_loss(const std::vector<std::vector<double>>& student_slots,
                         const std::vector<std::vector<double>>& teacher_slots) {
  if (student_slots.size() != teacher_slots.size()) {
    throw DimensionError("kl_alignment_loss: slot counts differ");
  }
  if (student_slots.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < student_slots.size(); ++i) {
    sum += kl_alignment_loss(student_slots[i], teacher_slots[i]);
  }
  return sum / static_cast<double>(student_slots.size());
}

TeacherStudentPair::TeacherStudentPair(ModelParams source_params,
                                       std::vector<double> frozen_encoder,
                                       double alpha1, double alpha2,
                                       double confidence_threshold)
    : TeacherStudentPair(source_params, source_params, std::move(frozen_encoder),
                         alpha1, alpha2, confidence_threshold) {}

TeacherStudentPair::TeacherStudentPair(ModelParams teacher, ModelParams student,
                                       std::vector<double> frozen_encoder,
                                       double alpha1, double alpha2,
                                       double confidence_threshold)
    : teacher_(std::move(teacher)),
      student_(std::move(student)),
      frozen_encoder_(std::move(frozen_encoder)),
      alpha1_(alpha1),
      alpha2_(alpha2),
      confidence_threshold_(confidence_threshold) {
  if (teacher_.size() != student_.size()) {
    throw DimensionError("teacher/student parameter lengths differ: " +
                         std::to_string(teacher_.size()) + " vs " +
                         std::to_string(student_.size()));
  }
  if (alpha1_ < 0.0 || alpha1_ > 1.0 || alpha2_ < 0.0 || alpha2_ > 1.0) {
    throw DataError("EMA coefficients must lie in [0, 1]");
  }
  if (confidence_threshold_ < 0.0 || confidence_threshold_ > 1.0) {
    throw DataError("confidence threshold must lie in [0, 1]");
  }
}

void TeacherStudentPair::ema_step() {
  for (std::size_t i = 0; i < teacher_.size(); ++i) {
    teacher_[i] = alpha1_ * teacher_[i] + (1.0 - alpha1_) * student_[i];
  }
}

ModelParams TeacherStudentPair::finalize() const {
  ModelParams merged(teacher_.size());
  for (std::size_t i = 0; i < teacher_.size(); ++i) {
    merged[i] = alpha2_ * teacher_[i] + (1.0 - alpha2_) * student_[i];
  }
  return merged;
}

AdaptReport TeacherStudentPair::adapt_on_keyframe(const AdaptableModel& model,
                                                  const Frame& frame, double lr,
                                                  Augmenter& augmenter,
                                                  KlDirection kl_direction) {
  if (teacher_.size() != model.param_count()) {
    throw DimensionError("pair parameters do not match the model's parameter count");
  }

  AdaptReport report;

  const std::vector<double> weak = augmenter.weak(frame.features);
  const Prediction teacher_pred = model.predict(teacher_, weak);
  const std::vector<Detection> labels =
      filter_pseudo_labels(teacher_pred.detections(), confidence_threshold_);
  if (labels.empty()) {
    return report;
  }

  const std::vector<double> strong = augmenter.strong(frame.features);
  const LossGrad task = model.task_loss_and_gradient(student_, strong, labels);
  const std::vector<std::vector<double>> teacher_dists =
      model.classification_distributions(teacher_, strong);
  const LossGrad align =
      model.alignment_loss_and_gradient(student_, strong, teacher_dists, kl_direction);

  if (task.gradient.size() != student_.size() ||
      align.gradient.size() != student_.size()) {
    throw DimensionError("adapt_on_keyframe: gradient length does not match params");
  }
  if (!std::isfinite(task.loss) || !std::isfinite(align.loss) ||
      !all_finite(task.gradient) || !all_finite(align.gradient)) {
    throw NumericError("adapt_on_keyframe: non-finite loss or gradient at frame " +
                       std::to_string(frame.id));
  }

  ModelParams updated(student_.size());
  for (std::size_t i = 0; i < student_.size(); ++i) {
    updated[i] = student_[i] - lr * (task.gradient[i] + align.gradient[i]);
  }
  if (!all_finite(updated)) {
    throw NumericError("adapt_on_keyframe: parameter update diverged at frame " +
                       std::to_string(frame.id));
  }

  student_ = std::move(updated);
  ema_step();

  report.task_loss = task.loss;
  report.kl_loss = align.loss;
  report.labels_used = labels.size();
  report.updated = true;
  return report;
}

}  // namespace streamadapt

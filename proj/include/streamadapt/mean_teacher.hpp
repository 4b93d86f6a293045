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

#ifndef STREAMADAPT_MEAN_TEACHER_HPP_
#define STREAMADAPT_MEAN_TEACHER_HPP_

#include <span>
#include <vector>

#include "streamadapt/frame.hpp"
#include "streamadapt/model.hpp"

namespace streamadapt {

/// Keeps exactly the detections whose confidence is strictly greater than
/// `threshold`. Output order follows input order.
std::vector<Detection> filter_pseudo_labels(const std::vector<Detection>& predictions,
                                            double threshold);

/// KL divergence sum_k s_k * ln(s_k / t_k) between two distributions over
/// the same support. Both sides are floored to 1e-12 and renormalized
/// first, so degenerate inputs never produce infinities. The result is
/// clamped at 0 (rounding can drive the sum a hair negative).
double kl_alignment_loss(std::span<const double> student_dist,
                         std::span<const double> teacher_dist);

/// Slot-averaged KL over matched per-slot distributions.
double kl_alignment_loss(const std::vector<std::vector<double>>& student_slots,
                         const std::vector<std::vector<double>>& teacher_slots);

/// What one adapt_on_keyframe call did. When no pseudo-label survives the
/// confidence filter, `updated` is false and both models are untouched.
struct AdaptReport {
  double task_loss = 0.0;
  double kl_loss = 0.0;
  std::size_t labels_used = 0;
  bool updated = false;
};

/// Teacher and student parameter vectors plus a frozen copy of the initial
/// teacher's encoder parameters. The teacher changes only through
/// ema_step(); the student only through adapt_on_keyframe()'s gradient
/// step. Single owner; adapt_on_keyframe is not reentrant.
class TeacherStudentPair {
 public:
  /// Both models start from the pretrained source parameters.
  TeacherStudentPair(ModelParams source_params, std::vector<double> frozen_encoder,
                     double alpha1 = 0.996, double alpha2 = 0.9,
                     double confidence_threshold = 0.9);

  /// Distinct initial teacher/student, for tests and checkpoint resume.
  /// Throws DimensionError when the two lengths differ.
  TeacherStudentPair(ModelParams teacher, ModelParams student,
                     std::vector<double> frozen_encoder, double alpha1,
                     double alpha2, double confidence_threshold);

  const ModelParams& teacher() const { return teacher_; }
  const ModelParams& student() const { return student_; }
  const std::vector<double>& frozen_encoder() const { return frozen_encoder_; }
  double alpha1() const { return alpha1_; }
  double alpha2() const { return alpha2_; }
  double confidence_threshold() const { return confidence_threshold_; }

  /// teacher <- alpha1 * teacher + (1 - alpha1) * student, componentwise.
  void ema_step();

  /// Read-out of the final blend alpha2 * teacher + (1 - alpha2) * student.
  /// The pair itself is unchanged.
  ModelParams finalize() const;

  /// One keyframe update: teacher pseudo-labels from the weakly augmented
  /// frame, combined task + alignment loss on the strongly augmented frame,
  /// one gradient-descent step of size `lr` on the student, then an EMA
  /// step. Throws NumericError (state unchanged) when the loss or gradient
  /// diverges.
  AdaptReport adapt_on_keyframe(const AdaptableModel& model, const Frame& frame,
                                double lr, Augmenter& augmenter,
                                KlDirection kl_direction = KlDirection::StudentToTeacher);

 private:
  ModelParams teacher_;
  ModelParams student_;
  std::vector<double> frozen_encoder_;
  double alpha1_;
  double alpha2_;
  double confidence_threshold_;
};

}  // namespace streamadapt

#endif  // STREAMADAPT_MEAN_TEACHER_HPP_

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

#ifndef STREAMADAPT_ACQUISITION_HPP_
#define STREAMADAPT_ACQUISITION_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamadapt/cluster_bank.hpp"
#include "streamadapt/frame.hpp"

namespace streamadapt {

/// Knobs of the two-stage frame selection.
struct AcquisitionConfig {
  /// Similarity threshold shared by both cluster banks. A frame whose best
  /// similarity is below gamma spawns a new cluster and becomes a keyframe.
  double gamma = 0.975;
  /// Warm-up ends once the accepted pseudo-label total exceeds this ...
  std::size_t warmup_min_total = 10000;
  /// ... and the rarest/most-popular count ratio reaches this.
  double warmup_min_ratio = 0.003;
  /// Second-stage (rare category) selection on/off.
  bool arc_enabled = true;
  /// When true the rare category is latched at warm-up completion instead
  /// of being recomputed every frame.
  bool freeze_rare_category = false;

  /// Throws DataError when a field is out of range.
  void validate() const;
};

/// Running pseudo-label counts per category, aggregated over every frame
/// seen so far (keyframe or not). Counts only increase.
class CategoryHistogram {
 public:
  explicit CategoryHistogram(std::size_t num_categories);

  /// Increments the count of `category`. Throws DataError when the id is
  /// outside the configured range.
  void add(int category);

  std::size_t num_categories() const { return counts_.size(); }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t total() const { return total_; }

  static CategoryHistogram from_counts(std::vector<std::size_t> counts);

 private:
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Category with the smallest aggregated count; ties break to the lowest
/// id. Throws DataError when no category is configured.
int rare_category(const CategoryHistogram& hist);

/// True once the pseudo-label statistics are considered stable: total
/// count strictly above `warmup_min_total`, rarest/most-popular ratio at
/// least `warmup_min_ratio`, and at least two categories configured.
bool warmup_complete(const CategoryHistogram& hist, const AcquisitionConfig& cfg);

enum class KeyframeSource { Auf, Arc };

/// Per-frame outcome with the similarity scores that produced it.
/// `arc_score` is present only when the second stage was consulted;
/// `rare_category` is present once warm-up has completed.
struct AcquisitionDecision {
  bool keyframe = false;
  std::optional<KeyframeSource> source;
  std::optional<double> auf_score;
  std::optional<double> arc_score;
  std::optional<int> rare_category;

  nlohmann::json to_json(std::int64_t frame_id) const;
};

const char* to_string(KeyframeSource source);

/// The per-frame decision state machine: first-stage dissimilarity
/// selection over the AUF bank, then a warm-up-gated second chance against
/// the independent ARC bank for frames whose pseudo-labels contain the
/// rare category. Strictly sequential; single owner.
class AcquisitionState {
 public:
  AcquisitionState(std::size_t embedding_dim, std::size_t num_categories);

  /// Folds one frame's filtered pseudo-labels into the histogram. Runs for
  /// every frame, keyframe or not.
  void update_histogram(const std::vector<Detection>& labels);

  /// Full decision for one frame: histogram update, warm-up latch, AUF
  /// observe, then the ARC second chance when eligible. `embedding` must
  /// come from the frozen encoder; `labels` must already be
  /// confidence-filtered.
  AcquisitionDecision process_frame(std::span<const double> embedding,
                                    const std::vector<Detection>& labels,
                                    const AcquisitionConfig& cfg);

  const ClusterBank& auf_bank() const { return auf_bank_; }
  const ClusterBank& arc_bank() const { return arc_bank_; }
  const CategoryHistogram& histogram() const { return histogram_; }
  bool warmup_done() const { return warmup_done_; }
  std::optional<int> frozen_rare() const { return frozen_rare_; }

  nlohmann::json to_json() const;
  static AcquisitionState from_json(const nlohmann::json& j);

 private:
  ClusterBank auf_bank_;
  ClusterBank arc_bank_;
  CategoryHistogram histogram_;
  bool warmup_done_ = false;  // latched; never reverts
  std::optional<int> frozen_rare_;
};

}  // namespace streamadapt

#endif  // STREAMADAPT_ACQUISITION_HPP_

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

#include "streamadapt/acquisition.hpp"

#include <algorithm>

#include "streamadapt/error.hpp"

namespace streamadapt {

void AcquisitionConfig::validate() const {
  if (gamma < -1.0) {
    throw DataError("acquisition config: gamma must be >= -1");
  }
  if (warmup_min_total < 1) {
    throw DataError("acquisition config: warmup_min_total must be >= 1");
  }
  if (warmup_min_ratio < 0.0 || warmup_min_ratio > 1.0) {
    throw DataError("acquisition config: warmup_min_ratio must be in [0, 1]");
  }
}

CategoryHistogram::CategoryHistogram(std::size_t num_categories)
    : counts_(num_categories, 0) {}

void CategoryHistogram::add(int category) {
  if (category < 0 || static_cast<std::size_t>(category) >= counts_.size()) {
    throw DataError("category id " + std::to_string(category) +
                    " outside configured range [0, " +
                    std::to_string(counts_.size()) + ")");
  }
  counts_[static_cast<std::size_t>(category)] += 1;
  total_ += 1;
}

CategoryHistogram CategoryHistogram::from_counts(std::vector<std::size_t> counts) {
  CategoryHistogram hist(counts.size());
  hist.counts_ = std::move(counts);
  hist.total_ = 0;
  for (std::size_t c : hist.counts_) {
    hist.total_ += c;
  }
  return hist;
}

int rare_category(const CategoryHistogram& hist) {
  if (hist.num_categories() == 0) {
    throw DataError("rare_category: no categories configured");
  }
  const auto& counts = hist.counts();
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] < counts[best]) {  // strict: ties keep the lowest id
      best = c;
    }
  }
  return static_cast<int>(best);
}

bool warmup_complete(const CategoryHistogram& hist, const AcquisitionConfig& cfg) {
  if (hist.num_categories() < 2) {
    return false;
  }
  if (hist.total() <= cfg.warmup_min_total) {
    return false;
  }
  const auto& counts = hist.counts();
  const std::size_t min = *std::min_element(counts.begin(), counts.end());
  const std::size_t max = *std::max_element(counts.begin(), counts.end());
  if (max == 0) {
    return false;
  }
  return static_cast<double>(min) / static_cast<double>(max) >= cfg.warmup_min_ratio;
}

const char* to_string(KeyframeSource source) {
  return source == KeyframeSource::Auf ? "auf" : "arc";
}

nlohmann::json AcquisitionDecision::to_json(std::int64_t frame_id) const {
  nlohmann::json j;
  j["frame_id"] = frame_id;
  j["verdict"] = keyframe ? "keyframe" : "skip";
  j["source"] = source.has_value() ? nlohmann::json(to_string(*source))
                                   : nlohmann::json(nullptr);
  j["auf_score"] = auf_score.has_value() ? nlohmann::json(*auf_score)
                                         : nlohmann::json(nullptr);
  j["arc_score"] = arc_score.has_value() ? nlohmann::json(*arc_score)
                                         : nlohmann::json(nullptr);
  j["rare_category"] = rare_category.has_value() ? nlohmann::json(*rare_category)
                                                 : nlohmann::json(nullptr);
  return j;
}

AcquisitionState::AcquisitionState(std::size_t embedding_dim, std::size_t num_categories)
    : auf_bank_(embedding_dim), arc_bank_(embedding_dim), histogram_(num_categories) {}

void AcquisitionState::update_histogram(const std::vector<Detection>& labels) {
  for (const Detection& label : labels) {
    histogram_.add(label.category);
  }
}

AcquisitionDecision AcquisitionState::process_frame(std::span<const double> embedding,
                                                    const std::vector<Detection>& labels,
                                                    const AcquisitionConfig& cfg) {
  update_histogram(labels);

  if (!warmup_done_ && warmup_complete(histogram_, cfg)) {
    warmup_done_ = true;
    if (cfg.freeze_rare_category) {
      frozen_rare_ = streamadapt::rare_category(histogram_);
    }
  }

  AcquisitionDecision decision;
  if (warmup_done_) {
    decision.rare_category = cfg.freeze_rare_category && frozen_rare_.has_value()
                                 ? *frozen_rare_
                                 : streamadapt::rare_category(histogram_);
  }

  ObserveResult auf = auf_bank_.observe(embedding, cfg.gamma);
  decision.auf_score = auf.score;
  if (auf.spawned()) {
    decision.keyframe = true;
    decision.source = KeyframeSource::Auf;
    return decision;
  }

  const bool rare_present =
      decision.rare_category.has_value() &&
      std::any_of(labels.begin(), labels.end(), [&](const Detection& d) {
        return d.category == *decision.rare_category;
      });
  if (warmup_done_ && cfg.arc_enabled && rare_present) {
    ObserveResult arc = arc_bank_.observe(embedding, cfg.gamma);
    decision.arc_score = arc.score;
    if (arc.spawned()) {
      decision.keyframe = true;
      decision.source = KeyframeSource::Arc;
    }
  }
  return decision;
}

nlohmann::json AcquisitionState::to_json() const {
  nlohmann::json j;
  j["auf_bank"] = auf_bank_.to_json();
  j["arc_bank"] = arc_bank_.to_json();
  j["histogram"] = histogram_.counts();
  j["warmup_done"] = warmup_done_;
  j["frozen_rare_category"] = frozen_rare_.has_value() ? nlohmann::json(*frozen_rare_)
                                                       : nlohmann::json(nullptr);
  return j;
}

AcquisitionState AcquisitionState::from_json(const nlohmann::json& j) {
  ClusterBank auf = ClusterBank::from_json(j.at("auf_bank"));
  ClusterBank arc = ClusterBank::from_json(j.at("arc_bank"));
  if (auf.dimension() != arc.dimension()) {
    throw DimensionError("acquisition snapshot: bank dimensions differ");
  }
  auto counts = j.at("histogram").get<std::vector<std::size_t>>();

  AcquisitionState state(auf.dimension(), counts.size());
  state.auf_bank_ = std::move(auf);
  state.arc_bank_ = std::move(arc);
  state.histogram_ = CategoryHistogram::from_counts(std::move(counts));
  state.warmup_done_ = j.at("warmup_done").get<bool>();
  if (j.contains("frozen_rare_category") && !j["frozen_rare_category"].is_null()) {
    state.frozen_rare_ = j["frozen_rare_category"].get<int>();
  }
  return state;
}

}  // namespace streamadapt

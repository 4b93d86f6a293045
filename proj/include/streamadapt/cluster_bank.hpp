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

#ifndef STREAMADAPT_CLUSTER_BANK_HPP_
#define STREAMADAPT_CLUSTER_BANK_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace streamadapt {

/// Cosine similarity a.b / (|a||b|), clamped to [-1, 1] to absorb
/// rounding. Throws DimensionError on mismatched sizes and DataError on a
/// zero-norm input.
double cosine(std::span<const double> a, std::span<const double> b);

/// One cluster: the running mean of all embeddings ever assigned to it.
/// Centroids are stored unnormalized; cosine comparison handles magnitude.
struct Cluster {
  std::vector<double> centroid;
  std::size_t member_count = 0;
};

/// Best-matching cluster for an embedding.
struct BankMatch {
  double score = 0.0;
  std::size_t index = 0;
};

enum class ObserveKind { Spawned, Assigned };

/// Outcome of one observe() call. `score` is the maximum cosine over the
/// centroids that existed before the call; absent when the bank was empty.
struct ObserveResult {
  ObserveKind kind = ObserveKind::Spawned;
  std::size_t index = 0;
  std::optional<double> score;

  bool spawned() const { return kind == ObserveKind::Spawned; }
};

/// Incremental online clustering over embeddings. Clusters are kept in
/// creation order and compared by linear scan; there is no merging,
/// splitting or eviction. Single-owner mutable structure.
class ClusterBank {
 public:
  explicit ClusterBank(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return clusters_.size(); }
  bool empty() const { return clusters_.empty(); }
  const std::vector<Cluster>& clusters() const { return clusters_; }

  /// Maximum cosine over all centroids and the index of the maximizing
  /// cluster (ties break to the lowest index). Nullopt when the bank is
  /// empty.
  std::optional<BankMatch> max_similarity(std::span<const double> e) const;

  /// Routes one embedding: spawns a new cluster when the bank is empty or
  /// the best similarity falls below `gamma`, otherwise folds the
  /// embedding into the closest cluster's running mean.
  ObserveResult observe(std::span<const double> e, double gamma);

  nlohmann::json to_json() const;
  static ClusterBank from_json(const nlohmann::json& j);

 private:
  std::size_t dimension_;
  std::vector<Cluster> clusters_;
};

}  // namespace streamadapt

#endif  // STREAMADAPT_CLUSTER_BANK_HPP_

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

#include "streamadapt/cluster_bank.hpp"

#include <algorithm>
#include <cmath>

#include "streamadapt/error.hpp"

namespace streamadapt {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine: dimensions " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw DataError("cosine: zero-norm input vector");
  }
  double value = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(value, -1.0, 1.0);
}

ClusterBank::ClusterBank(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) {
    throw DimensionError("cluster bank dimension must be positive");
  }
}

std::optional<BankMatch> ClusterBank::max_similarity(std::span<const double> e) const {
  if (e.size() != dimension_) {
    throw DimensionError("embedding dimension " + std::to_string(e.size()) +
                         " does not match bank dimension " + std::to_string(dimension_));
  }
  if (clusters_.empty()) {
    return std::nullopt;
  }
  BankMatch best{-2.0, 0};
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    double score = cosine(e, clusters_[i].centroid);
    if (score > best.score) {  // strict: ties keep the lowest index
      best = BankMatch{score, i};
    }
  }
  return best;
}

ObserveResult ClusterBank::observe(std::span<const double> e, double gamma) {
  auto match = max_similarity(e);
  if (!match.has_value() || match->score < gamma) {
    clusters_.push_back(Cluster{std::vector<double>(e.begin(), e.end()), 1});
    ObserveResult result{ObserveKind::Spawned, clusters_.size() - 1, std::nullopt};
    if (match.has_value()) {
      result.score = match->score;
    }
    return result;
  }

  Cluster& cluster = clusters_[match->index];
  const double k = static_cast<double>(cluster.member_count);
  for (std::size_t i = 0; i < dimension_; ++i) {
    cluster.centroid[i] = (cluster.centroid[i] * k + e[i]) / (k + 1.0);
  }
  cluster.member_count += 1;
  return ObserveResult{ObserveKind::Assigned, match->index, match->score};
}

nlohmann::json ClusterBank::to_json() const {
  nlohmann::json j;
  j["dimension"] = dimension_;
  nlohmann::json clusters = nlohmann::json::array();
  for (const Cluster& c : clusters_) {
    clusters.push_back({{"centroid", c.centroid}, {"member_count", c.member_count}});
  }
  j["clusters"] = std::move(clusters);
  return j;
}

ClusterBank ClusterBank::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dimension") || !j.contains("clusters")) {
    throw DataError("cluster bank snapshot needs \"dimension\" and \"clusters\"");
  }
  ClusterBank bank(j["dimension"].get<std::size_t>());
  for (const auto& c : j["clusters"]) {
    Cluster cluster;
    cluster.centroid = c.at("centroid").get<std::vector<double>>();
    cluster.member_count = c.at("member_count").get<std::size_t>();
    if (cluster.centroid.size() != bank.dimension_) {
      throw DimensionError("cluster bank snapshot has a centroid of wrong dimension");
    }
    if (cluster.member_count == 0) {
      throw DataError("cluster bank snapshot has a cluster with zero members");
    }
    bank.clusters_.push_back(std::move(cluster));
  }
  return bank;
}

}  // namespace streamadapt

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

#include "streamadapt/model.hpp"

#include "streamadapt/error.hpp"

namespace streamadapt {

std::vector<Detection> Prediction::detections() const {
  std::vector<Detection> out;
  out.reserve(slot_distributions.size());
  for (const auto& dist : slot_distributions) {
    if (dist.empty()) {
      throw DataError("prediction slot has an empty distribution");
    }
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < dist.size(); ++k) {
      if (dist[k] > dist[argmax]) {
        argmax = k;
      }
    }
    out.push_back(Detection{static_cast<int>(argmax), dist[argmax]});
  }
  return out;
}

}  // namespace streamadapt

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

#ifndef STREAMADAPT_FRAME_HPP_
#define STREAMADAPT_FRAME_HPP_

#include <cstdint>
#include <optional>
#include <vector>

namespace streamadapt {

/// One predicted object: a category id with a confidence in [0, 1].
struct Detection {
  int category = 0;
  double confidence = 0.0;
};

/// One stream element. `id` doubles as the time index and strictly
/// increases within a stream. `features` is the raw input fed to models;
/// `embedding` caches the frozen-encoder output once computed.
/// `detections` is present only for streams produced with an external
/// teacher; otherwise the engine generates pseudo-labels itself.
struct Frame {
  std::int64_t id = 0;
  std::vector<double> features;
  std::optional<std::vector<double>> embedding;
  std::optional<std::vector<Detection>> detections;
};

/// Checks that `frame.features` has exactly `expected_dim` finite entries.
/// Throws DimensionError on a size mismatch and DataError on NaN/Inf.
void validate_frame(const Frame& frame, std::size_t expected_dim);

}  // namespace streamadapt

#endif  // STREAMADAPT_FRAME_HPP_

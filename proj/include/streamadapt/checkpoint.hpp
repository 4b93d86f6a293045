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

#ifndef STREAMADAPT_CHECKPOINT_HPP_
#define STREAMADAPT_CHECKPOINT_HPP_

#include <string>

#include "streamadapt/model.hpp"

namespace streamadapt {

/// One parameter vector plus run metadata. On disk: a single-line JSON
/// header {"model_name", "param_count", "alpha1", "alpha2"} followed by
/// param_count raw little-endian 64-bit floats.
struct Checkpoint {
  std::string model_name;
  ModelParams params;
  double alpha1 = 0.996;
  double alpha2 = 0.9;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);

/// Throws DataError on a malformed header or truncated payload.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace streamadapt

#endif  // STREAMADAPT_CHECKPOINT_HPP_

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

#include "streamadapt/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "streamadapt/error.hpp"

namespace streamadapt {

namespace {

// Payload is little-endian on disk regardless of host order.
void swap_if_big_endian(std::vector<double>& values) {
  if constexpr (std::endian::native == std::endian::big) {
    for (double& v : values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      bits = __builtin_bswap64(bits);
      std::memcpy(&v, &bits, sizeof(bits));
    }
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open checkpoint for writing: " + path);
  }
  nlohmann::json header;
  header["model_name"] = checkpoint.model_name;
  header["param_count"] = checkpoint.params.size();
  header["alpha1"] = checkpoint.alpha1;
  header["alpha2"] = checkpoint.alpha2;
  out << header.dump() << '\n';

  std::vector<double> payload = checkpoint.params;
  swap_if_big_endian(payload);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!out) {
    throw DataError("failed while writing checkpoint: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint: " + path);
  }
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw DataError("checkpoint missing header line: " + path);
  }
  nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
  if (header.is_discarded() || !header.is_object() || !header.contains("model_name") ||
      !header.contains("param_count") || !header.contains("alpha1") ||
      !header.contains("alpha2")) {
    throw DataError("malformed checkpoint header: " + path);
  }

  Checkpoint checkpoint;
  checkpoint.model_name = header["model_name"].get<std::string>();
  checkpoint.alpha1 = header["alpha1"].get<double>();
  checkpoint.alpha2 = header["alpha2"].get<double>();
  const auto count = header["param_count"].get<std::size_t>();

  checkpoint.params.resize(count);
  in.read(reinterpret_cast<char*>(checkpoint.params.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double)) {
    throw DataError("checkpoint payload truncated: " + path);
  }
  swap_if_big_endian(checkpoint.params);
  return checkpoint;
}

}  // namespace streamadapt

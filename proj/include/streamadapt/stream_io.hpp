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

#ifndef STREAMADAPT_STREAM_IO_HPP_
#define STREAMADAPT_STREAM_IO_HPP_

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "streamadapt/frame.hpp"

namespace streamadapt {

/// Incremental reader for the JSON Lines stream format: one object per
/// line with a "features" array and an optional "detections" array of
/// {"category", "confidence"} objects. Frames are yielded in file order
/// with ids 0, 1, 2, ... and memory use bounded by a single frame.
///
/// The feature dimension is fixed by the first record; later records with
/// a different dimension raise DimensionError naming the offending line.
class StreamReader {
 public:
  explicit StreamReader(const std::string& path);

  /// Next frame, or nullopt at end of stream. Whitespace-only lines are
  /// skipped. Throws ParseError / DimensionError with 1-based line numbers.
  std::optional<Frame> next();

  /// Dimension seen so far; nullopt before the first frame.
  std::optional<std::size_t> dimension() const { return dimension_; }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::optional<std::size_t> dimension_;
  std::size_t line_number_ = 0;
  std::int64_t next_id_ = 0;
};

/// Reads a whole stream eagerly. Convenience wrapper over StreamReader.
std::vector<Frame> read_stream(const std::string& path);

/// Writes frames in the stream file format. Feature values round-trip
/// bit-exactly through read_stream. Frame ids are positional and are not
/// stored in the file.
void write_stream(const std::string& path, const std::vector<Frame>& frames);

/// Serializes one frame to its stream-file JSON line (no trailing newline).
std::string frame_to_json_line(const Frame& frame);

}  // namespace streamadapt

#endif  // STREAMADAPT_STREAM_IO_HPP_

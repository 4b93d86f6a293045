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

#include "streamadapt/stream_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "streamadapt/error.hpp"

namespace streamadapt {

using nlohmann::json;

void validate_frame(const Frame& frame, std::size_t expected_dim) {
  if (frame.features.size() != expected_dim) {
    throw DimensionError("frame " + std::to_string(frame.id) + " has dimension " +
                         std::to_string(frame.features.size()) + ", expected " +
                         std::to_string(expected_dim));
  }
  for (double v : frame.features) {
    if (!std::isfinite(v)) {
      throw DataError("frame " + std::to_string(frame.id) +
                      " contains a non-finite feature value");
    }
  }
}

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::vector<Detection> parse_detections(const json& arr, std::size_t line_number) {
  if (!arr.is_array()) {
    throw ParseError("line " + std::to_string(line_number) +
                         ": \"detections\" must be an array",
                     line_number);
  }
  std::vector<Detection> out;
  out.reserve(arr.size());
  for (const auto& d : arr) {
    if (!d.is_object() || !d.contains("category") || !d.contains("confidence") ||
        !d["category"].is_number_integer() || !d["confidence"].is_number()) {
      throw ParseError("line " + std::to_string(line_number) +
                           ": detection entries need integer \"category\" and "
                           "numeric \"confidence\"",
                       line_number);
    }
    Detection det;
    det.category = d["category"].get<int>();
    det.confidence = d["confidence"].get<double>();
    if (det.category < 0) {
      throw ParseError("line " + std::to_string(line_number) +
                           ": negative category id",
                       line_number);
    }
    if (det.confidence < 0.0 || det.confidence > 1.0) {
      throw ParseError("line " + std::to_string(line_number) +
                           ": confidence outside [0, 1]",
                       line_number);
    }
    out.push_back(det);
  }
  return out;
}

}  // namespace

StreamReader::StreamReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) {
    throw DataError("cannot open stream file: " + path);
  }
}

std::optional<Frame> StreamReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (is_blank(line)) {
      continue;
    }

    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw ParseError(path_ + ": parse error at line " + std::to_string(line_number_),
                       line_number_);
    }
    if (!record.is_object() || !record.contains("features") ||
        !record["features"].is_array()) {
      throw ParseError(path_ + ": line " + std::to_string(line_number_) +
                           ": expected an object with a \"features\" array",
                       line_number_);
    }

    Frame frame;
    frame.id = next_id_;
    frame.features.reserve(record["features"].size());
    for (const auto& v : record["features"]) {
      if (!v.is_number()) {
        throw ParseError(path_ + ": line " + std::to_string(line_number_) +
                             ": non-numeric feature value",
                         line_number_);
      }
      frame.features.push_back(v.get<double>());
    }

    if (!dimension_.has_value()) {
      dimension_ = frame.features.size();
    } else if (frame.features.size() != *dimension_) {
      throw DimensionError(path_ + ": line " + std::to_string(line_number_) +
                           ": dimension " + std::to_string(frame.features.size()) +
                           " does not match stream dimension " +
                           std::to_string(*dimension_));
    }

    if (record.contains("detections")) {
      frame.detections = parse_detections(record["detections"], line_number_);
    }

    ++next_id_;
    return frame;
  }
  return std::nullopt;
}

std::vector<Frame> read_stream(const std::string& path) {
  StreamReader reader(path);
  std::vector<Frame> frames;
  while (auto frame = reader.next()) {
    frames.push_back(std::move(*frame));
  }
  return frames;
}

std::string frame_to_json_line(const Frame& frame) {
  json record;
  record["features"] = frame.features;
  if (frame.detections.has_value()) {
    json dets = json::array();
    for (const Detection& d : *frame.detections) {
      dets.push_back({{"category", d.category}, {"confidence", d.confidence}});
    }
    record["detections"] = std::move(dets);
  }
  return record.dump();
}

void write_stream(const std::string& path, const std::vector<Frame>& frames) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot open stream file for writing: " + path);
  }
  for (const Frame& frame : frames) {
    out << frame_to_json_line(frame) << '\n';
  }
  if (!out) {
    throw DataError("failed while writing stream file: " + path);
  }
}

}  // namespace streamadapt

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

#include <doctest.h>

#include <limits>
#include <string>
#include <vector>

#include "streamadapt/error.hpp"
#include "streamadapt/frame.hpp"
#include "test_util.hpp"

using namespace streamadapt;
using streamadapt::testing::TempDir;
using streamadapt::testing::write_text;

TEST_CASE("stream round-trips bit-exactly with positional ids") {
  TempDir dir;
  const std::string path = dir.file("stream.jsonl");

  std::vector<Frame> frames(3);
  frames[0].features = {0.1, -2.5, 1e-17};
  frames[1].features = {1.0 / 3.0, 0.0, -0.0};
  frames[2].features = {5e300, -5e-300, 42.0};
  frames[2].detections = std::vector<Detection>{{2, 0.95}, {0, 0.5}};

  write_stream(path, frames);
  const auto loaded = read_stream(path);

  REQUIRE(loaded.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded[i].id == static_cast<std::int64_t>(i));
    REQUIRE(loaded[i].features.size() == 3);
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(loaded[i].features[k] == frames[i].features[k]);
  }
  CHECK_FALSE(loaded[0].detections.has_value());
  CHECK_FALSE(loaded[1].detections.has_value());
  REQUIRE(loaded[2].detections.has_value());
  REQUIRE(loaded[2].detections->size() == 2);
  CHECK((*loaded[2].detections)[0].category == 2);
  CHECK((*loaded[2].detections)[0].confidence == 0.95);
  CHECK((*loaded[2].detections)[1].category == 0);
}

TEST_CASE("blank lines are skipped without consuming ids") {
  TempDir dir;
  const std::string path = dir.file("gaps.jsonl");
  write_text(path,
             "\n"
             "{\"features\": [1.0, 2.0]}\n"
             "   \t  \n"
             "{\"features\": [3.0, 4.0]}\n"
             "\n");
  const auto frames = read_stream(path);
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].id == 0);
  CHECK(frames[1].id == 1);
  CHECK(frames[1].features[0] == 3.0);
}

TEST_CASE("reader reports 1-based line numbers on parse failures") {
  TempDir dir;
  const std::string path = dir.file("bad.jsonl");
  write_text(path,
             "{\"features\": [1.0]}\n"
             "{\"features\": [2.0]}\n"
             "not json\n");
  StreamReader reader(path);
  CHECK(reader.next().has_value());
  CHECK(reader.next().has_value());
  try {
    reader.next();
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("missing features key is a parse error") {
  TempDir dir;
  const std::string path = dir.file("nokey.jsonl");
  write_text(path, "{\"fetures\": [1.0]}\n");
  CHECK_THROWS_AS(read_stream(path), ParseError);
}

TEST_CASE("non-numeric feature value is a parse error") {
  TempDir dir;
  const std::string path = dir.file("nonnum.jsonl");
  write_text(path, "{\"features\": [1.0, \"x\"]}\n");
  CHECK_THROWS_AS(read_stream(path), ParseError);
}

TEST_CASE("dimension changes mid-stream raise DimensionError with the line") {
  TempDir dir;
  const std::string path = dir.file("dims.jsonl");
  write_text(path,
             "{\"features\": [1.0, 2.0]}\n"
             "{\"features\": [1.0, 2.0, 3.0]}\n");
  StreamReader reader(path);
  CHECK(reader.next().has_value());
  CHECK(reader.dimension() == 2);
  try {
    reader.next();
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("detection validation rejects bad confidence and category") {
  TempDir dir;
  const std::string bad_conf = dir.file("conf.jsonl");
  write_text(bad_conf,
             "{\"features\": [1.0], \"detections\": "
             "[{\"category\": 0, \"confidence\": 1.5}]}\n");
  CHECK_THROWS_AS(read_stream(bad_conf), ParseError);

  const std::string bad_cat = dir.file("cat.jsonl");
  write_text(bad_cat,
             "{\"features\": [1.0], \"detections\": "
             "[{\"category\": -1, \"confidence\": 0.5}]}\n");
  CHECK_THROWS_AS(read_stream(bad_cat), ParseError);
}

TEST_CASE("missing file raises DataError") {
  CHECK_THROWS_AS(StreamReader("/nonexistent/stream.jsonl"), DataError);
}

TEST_CASE("validate_frame checks dimension and finiteness") {
  Frame frame;
  frame.id = 7;
  frame.features = {1.0, 2.0};
  CHECK_NOTHROW(validate_frame(frame, 2));
  CHECK_THROWS_AS(validate_frame(frame, 3), DimensionError);
  frame.features[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_frame(frame, 2), DataError);
}

TEST_CASE("empty file yields an empty stream") {
  TempDir dir;
  const std::string path = dir.file("empty.jsonl");
  write_text(path, "");
  CHECK(read_stream(path).empty());
}

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

#include "streamadapt/cli.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "streamadapt/acquisition.hpp"
#include "streamadapt/checkpoint.hpp"
#include "streamadapt/engine_config.hpp"
#include "streamadapt/frame.hpp"
#include "streamadapt/sim_harness.hpp"
#include "streamadapt/stream_io.hpp"
#include "streamadapt/toy_detector.hpp"
#include "test_util.hpp"

using namespace streamadapt;
using nlohmann::json;
using streamadapt::testing::CaptureOutput;
using streamadapt::testing::TempDir;
using streamadapt::testing::read_text;
using streamadapt::testing::write_text;

namespace {

/// A 2-d two-category setup small enough for the full loop to be instant.
EngineConfig tiny_config() {
  EngineConfig config;
  config.mode = RunMode::Auf;
  config.model = ToyDetectorConfig{2, 2, 2, 0};
  config.acquisition.gamma = 0.9;
  config.acquisition.warmup_min_total = 2;
  return config;
}

Frame frame_of(std::int64_t id, std::vector<double> features, int category) {
  Frame frame;
  frame.id = id;
  frame.features = std::move(features);
  frame.detections = std::vector<Detection>{Detection{category, 0.95}};
  return frame;
}

/// Three frames, two distinct embeddings: exactly two keyframes at gamma 0.9.
std::string write_tiny_stream(TempDir& dir, const std::string& name) {
  const std::string path = dir.file(name);
  write_stream(path, {frame_of(0, {1.0, 0.0}, 0), frame_of(1, {1.0, 0.0}, 0),
                      frame_of(2, {0.0, 1.0}, 1)});
  return path;
}

std::string write_tiny_config(TempDir& dir, const std::string& name) {
  const std::string path = dir.file(name);
  write_text(path, tiny_config().to_json().dump());
  return path;
}

}  // namespace

TEST_CASE("cli rejects missing or unknown arguments") {
  CaptureOutput capture;
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"select", "--no-such-flag"}) == 1);
  CHECK(run_cli({"frobnicate"}) == 1);
  CHECK(run_cli({"select", "--mode", "turbo"}) == 1);
  CHECK(capture.cerr_text().find("error:") != std::string::npos);
}

TEST_CASE("cli help exits cleanly") {
  CaptureOutput capture;
  CHECK(run_cli({"--help"}) == 0);
  CHECK(capture.cout_text().find("select") != std::string::npos);
  CHECK(capture.cout_text().find("simulate") != std::string::npos);
}

TEST_CASE("select writes a decision log and summary") {
  TempDir dir;
  const std::string stream = write_tiny_stream(dir, "stream.jsonl");
  const std::string config = write_tiny_config(dir, "config.json");
  const std::string log = dir.file("decisions.jsonl");
  const std::string state = dir.file("state.json");

  CaptureOutput capture;
  const int rc = run_cli({"select", "--config", config, "--stream", stream,
                          "--log-out", log, "--state-out", state});
  REQUIRE(rc == 0);
  const std::string out = capture.cout_text();
  CHECK(out.find("frames: 3") != std::string::npos);
  CHECK(out.find("keyframes: 2 (auf 2, arc 0)") != std::string::npos);

  std::istringstream lines(read_text(log));
  std::string line;
  std::vector<json> records;
  while (std::getline(lines, line))
    if (!line.empty()) records.push_back(json::parse(line));
  REQUIRE(records.size() == 3);
  CHECK(records[0]["frame_id"] == 0);
  CHECK(records[0]["verdict"] == "keyframe");
  CHECK(records[0]["source"] == "auf");
  CHECK(records[1]["verdict"] == "skip");
  CHECK(records[2]["verdict"] == "keyframe");

  // The state snapshot must be loadable again.
  const json snapshot = json::parse(read_text(state));
  CHECK(snapshot["auf_bank"]["clusters"].size() == 2);
  CHECK_NOTHROW(AcquisitionState::from_json(snapshot));
}

TEST_CASE("select usage and data failures") {
  TempDir dir;
  const std::string config = write_tiny_config(dir, "config.json");
  CaptureOutput capture;

  // No stream anywhere: operator error.
  CHECK(run_cli({"select", "--config", config, "--log-out",
                 dir.file("a.jsonl")}) == 1);
  // Stream path that does not exist: data error.
  CHECK(run_cli({"select", "--config", config, "--stream",
                 dir.file("absent.jsonl"), "--log-out", dir.file("b.jsonl")}) == 2);
  // Unreadable config file: data error.
  const std::string broken = dir.file("broken.json");
  write_text(broken, "{not json");
  CHECK(run_cli({"select", "--config", broken}) == 2);
}

TEST_CASE("select --print-config dumps the effective configuration") {
  CaptureOutput capture;
  REQUIRE(run_cli({"select", "--print-config"}) == 0);
  const json config = json::parse(capture.cout_text());
  CHECK(config["gamma"] == 0.975);
  CHECK(config["mode"] == "auf_arc");
  CHECK(config["feature_dim"] == 16);
}

TEST_CASE("adapt runs end to end with checkpoints") {
  TempDir dir;
  const std::string stream = write_tiny_stream(dir, "stream.jsonl");
  const std::string config = write_tiny_config(dir, "config.json");
  const std::string ckpt_in = dir.file("in.ckpt");
  const std::string ckpt_out = dir.file("out.ckpt");
  const std::string report = dir.file("report.json");

  Checkpoint seed;
  seed.model_name = "tiny";
  // Confident enough (~0.993) for the teacher to keep its own pseudo-labels.
  seed.params = {5.0, 0.0, 0.0, 5.0, 0.0, 0.0};
  save_checkpoint(ckpt_in, seed);

  CaptureOutput capture;
  const int rc = run_cli({"adapt", "--config", config, "--stream", stream,
                          "--checkpoint-in", ckpt_in, "--checkpoint-out",
                          ckpt_out, "--report-out", report});
  REQUIRE(rc == 0);

  const json summary = json::parse(read_text(report));
  CHECK(summary["mode"] == "auf");
  CHECK(summary["frames_total"] == 3);
  CHECK(summary["keyframes_total"] == 2);
  CHECK(summary["clusters_auf"] == 2);
  // The same report goes to stdout.
  CHECK(json::parse(capture.cout_text()) == summary);

  const Checkpoint out = load_checkpoint(ckpt_out);
  CHECK(out.model_name == "tiny");
  CHECK(out.params.size() == 6);
  CHECK(out.alpha1 == 0.996);
  CHECK(out.alpha2 == 0.9);
  // Both keyframes triggered real updates, well above blend rounding noise.
  double max_delta = 0.0;
  for (std::size_t i = 0; i < out.params.size(); ++i)
    max_delta = std::max(max_delta, std::abs(out.params[i] - seed.params[i]));
  CHECK(max_delta > 1e-9);
}

TEST_CASE("adapt mode override bypasses selection") {
  TempDir dir;
  const std::string stream = write_tiny_stream(dir, "stream.jsonl");
  const std::string config = write_tiny_config(dir, "config.json");
  const std::string ckpt_in = dir.file("in.ckpt");
  Checkpoint seed;
  seed.params = ModelParams(6, 0.0);
  save_checkpoint(ckpt_in, seed);

  CaptureOutput capture;
  REQUIRE(run_cli({"adapt", "--config", config, "--stream", stream,
                   "--checkpoint-in", ckpt_in, "--mode", "no_acquire"}) == 0);
  const json summary = json::parse(capture.cout_text());
  CHECK(summary["mode"] == "no_acquire");
  CHECK(summary["keyframes_total"] == 3);
}

TEST_CASE("adapt failure modes") {
  TempDir dir;
  const std::string stream = write_tiny_stream(dir, "stream.jsonl");
  const std::string config = write_tiny_config(dir, "config.json");
  CaptureOutput capture;

  // Checkpoint is mandatory for adaptation.
  CHECK(run_cli({"adapt", "--config", config, "--stream", stream}) == 1);

  // Parameter count mismatch between checkpoint and configured model.
  const std::string short_ckpt = dir.file("short.ckpt");
  Checkpoint bad;
  bad.params = ModelParams(5, 0.0);
  save_checkpoint(short_ckpt, bad);
  CHECK(run_cli({"adapt", "--config", config, "--stream", stream,
                 "--checkpoint-in", short_ckpt}) == 2);

  // Stream dimension does not match the configured model.
  const std::string wide = dir.file("wide.jsonl");
  write_stream(wide, {frame_of(0, {1.0, 0.0, 0.0}, 0)});
  const std::string ckpt_in = dir.file("in.ckpt");
  Checkpoint seed;
  seed.params = ModelParams(6, 0.0);
  save_checkpoint(ckpt_in, seed);
  CHECK(run_cli({"adapt", "--config", config, "--stream", wide,
                 "--checkpoint-in", ckpt_in}) == 2);
}

TEST_CASE("simulate runs an ablation from a spec file") {
  TempDir dir;
  SimulationSpec sim;
  sim.stream.num_categories = 2;
  sim.stream.feature_dim = 2;
  sim.stream.class_frequencies = {0.7, 0.3};
  sim.stream.source_means = {{1.0, 0.0}, {0.0, 1.0}};
  sim.stream.target_means = {{0.9848, 0.1736}, {0.1736, 0.9848}};
  sim.stream.redundancy_rho = 0.5;
  sim.stream.length = 150;
  sim.stream.rng_seed = 1;
  sim.engine.model = ToyDetectorConfig{2, 2, 2, 0};
  sim.engine.acquisition.warmup_min_total = 20;
  sim.pretrain_steps = 100;

  const std::string spec_path = dir.file("sim.json");
  write_text(spec_path, sim.to_json().dump());
  const std::string json_out = dir.file("ablation.json");
  const std::string spec_copy = dir.file("resolved.json");
  const std::string stream_copy = dir.file("stream.jsonl");

  CaptureOutput capture;
  const int rc = run_cli({"simulate", "--spec", spec_path, "--json-out",
                          json_out, "--dump-spec", spec_copy, "--dump-stream",
                          stream_copy});
  REQUIRE(rc == 0);
  const std::string table = capture.cout_text();
  CHECK(table.find("no_acquire") != std::string::npos);
  CHECK(table.find("auf_arc") != std::string::npos);

  const json result = json::parse(read_text(json_out));
  CHECK(result["seeds"].size() == 5);  // the default seed set
  CHECK(result["modes"].size() == 3);

  CHECK_NOTHROW(SimulationSpec::load_file(spec_copy));
  StreamReader reader(stream_copy);
  std::size_t frames = 0;
  while (reader.next().has_value()) ++frames;
  CHECK(frames == 150);
}

TEST_CASE("simulate failure modes") {
  TempDir dir;
  CaptureOutput capture;
  // Neither a bundled name nor a readable file.
  CHECK(run_cli({"simulate", "--spec", dir.file("no-such-spec.json")}) == 2);
  // Too few seeds for the mean/stddev columns to be meaningful.
  CHECK(run_cli({"simulate", "--spec", "reference", "--seeds", "0,1"}) == 2);
}

TEST_CASE("simulate --print-config resolves bundled specs") {
  CaptureOutput capture;
  REQUIRE(run_cli({"simulate", "--spec", "adversarial", "--print-config"}) == 0);
  const json spec = json::parse(capture.cout_text());
  CHECK(spec["stream"]["redundancy_rho"] == 0.97);
  CHECK(spec["teacher_sharpness"] == 3.0);
}

TEST_CASE("report summarizes logs and checkpoints") {
  TempDir dir;
  const std::string stream = write_tiny_stream(dir, "stream.jsonl");
  const std::string config = write_tiny_config(dir, "config.json");
  const std::string log = dir.file("decisions.jsonl");
  {
    CaptureOutput run_capture;
    REQUIRE(run_cli({"select", "--config", config, "--stream", stream,
                     "--log-out", log}) == 0);
  }
  const std::string ckpt = dir.file("model.ckpt");
  Checkpoint seed;
  seed.model_name = "tiny";
  seed.params = {3.0, 4.0, 0.0, 0.0, 0.0, -5.0};
  save_checkpoint(ckpt, seed);

  CaptureOutput capture;
  REQUIRE(run_cli({"report", "--log", log, "--checkpoint", ckpt,
                   "--emit-json"}) == 0);
  const json summary = json::parse(capture.cout_text());
  CHECK(summary["decision_log"]["frames"] == 3);
  CHECK(summary["decision_log"]["keyframes"] == 2);
  CHECK(summary["decision_log"]["first_keyframe_id"] == 0);
  CHECK(summary["decision_log"]["last_keyframe_id"] == 2);
  CHECK(summary["checkpoint"]["param_count"] == 6);
  CHECK(summary["checkpoint"]["l2_norm"] == doctest::Approx(std::sqrt(50.0)));
  CHECK(summary["checkpoint"]["min"] == -5.0);
  CHECK(summary["checkpoint"]["max"] == 4.0);

  // Human-readable flavor of the same summary.
  CaptureOutput plain;
  REQUIRE(run_cli({"report", "--log", log}) == 0);
  CHECK(plain.cout_text().find("keyframes: 2") != std::string::npos);
}

TEST_CASE("report failure modes") {
  TempDir dir;
  CaptureOutput capture;
  CHECK(run_cli({"report"}) == 1);
  CHECK(run_cli({"report", "--log", dir.file("absent.jsonl")}) == 2);

  const std::string garbled = dir.file("garbled.jsonl");
  write_text(garbled, "{\"verdict\": \"keyframe\", \"frame_id\": 0}\nnot json\n");
  CHECK(run_cli({"report", "--log", garbled}) == 2);

  const std::string wrong_shape = dir.file("wrong.jsonl");
  write_text(wrong_shape, "{\"hello\": 1}\n");
  CHECK(run_cli({"report", "--log", wrong_shape}) == 2);
}

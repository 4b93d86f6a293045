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

#include "streamadapt/engine.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "streamadapt/error.hpp"
#include "streamadapt/frame.hpp"

using namespace streamadapt;

namespace {

/// Small 2-feature engine setup with a confident teacher (bias 5 on
/// category 0 gives confidence ~0.993 everywhere) and draw-free
/// augmentation, so runs are exactly reproducible.
struct EngineFixture {
  EngineFixture() {
    config.mode = RunMode::Auf;
    config.model.feature_dim = 2;
    config.model.embedding_dim = 2;
    config.model.num_categories = 2;
    config.augment.weak_sigma = 0.0;
    config.augment.strong_sigma = 0.0;
    config.augment.strong_mask_prob = 0.0;
  }

  ModelParams confident_source() const {
    const ToyDetector model(config.model);
    ModelParams params = model.zero_params();
    params[4] = 5.0;  // bias of category 0
    return params;
  }

  static Frame frame_at(std::int64_t id, double x, double y) {
    Frame f;
    f.id = id;
    f.features = {x, y};
    return f;
  }

  EngineConfig config;
};

double delta_norm(const ModelParams& a, const ModelParams& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("the first frame becomes a keyframe and triggers an update") {
  EngineFixture fx;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());

  const auto outcome = engine.process(EngineFixture::frame_at(0, 1.0, 0.0));
  CHECK(outcome.decision.keyframe);
  CHECK(outcome.decision.source == KeyframeSource::Auf);
  REQUIRE(outcome.adapt.has_value());
  CHECK(outcome.adapt->updated);
  CHECK(engine.frames_seen() == 1);
  CHECK(engine.keyframes_total() == 1);
  CHECK(engine.keyframes_auf() == 1);
  CHECK(engine.keyframes_arc() == 0);
}

TEST_CASE("identical frames collapse to a single keyframe") {
  EngineFixture fx;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());

  for (int i = 0; i < 50; ++i)
    engine.process(EngineFixture::frame_at(i, 0.6, 0.8));
  CHECK(engine.frames_seen() == 50);
  CHECK(engine.keyframes_total() == 1);
  CHECK(engine.acquisition().auf_bank().size() == 1);
}

TEST_CASE("skipped frames still feed the pseudo-label histogram") {
  EngineFixture fx;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());

  for (int i = 0; i < 10; ++i)
    engine.process(EngineFixture::frame_at(i, 0.6, 0.8));
  // The confident teacher emits one category-0 label per frame.
  CHECK(engine.acquisition().histogram().counts()[0] == 10);
  CHECK(engine.acquisition().histogram().total() == 10);
}

TEST_CASE("adapt-on-all mode bypasses acquisition entirely") {
  EngineFixture fx;
  fx.config.mode = RunMode::NoAcquire;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());

  for (int i = 0; i < 5; ++i) {
    const auto outcome = engine.process(EngineFixture::frame_at(i, 0.6, 0.8));
    CHECK(outcome.decision.keyframe);
    CHECK_FALSE(outcome.decision.source.has_value());
    REQUIRE(outcome.adapt.has_value());
    CHECK(outcome.adapt->updated);
  }
  CHECK(engine.keyframes_total() == 5);
  CHECK(engine.keyframes_auf() == 0);
  CHECK(engine.acquisition().auf_bank().empty());
  CHECK(engine.acquisition().histogram().total() == 0);
  CHECK_FALSE(engine.acquisition().warmup_done());
}

TEST_CASE("stream detections override the teacher's labels") {
  EngineFixture fx;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());

  Frame frame = EngineFixture::frame_at(0, 1.0, 0.0);
  frame.detections = std::vector<Detection>{{1, 0.95}, {0, 0.5}};
  const auto labels = engine.pseudo_labels(frame);
  REQUIRE(labels.size() == 1);  // 0.5 falls below the 0.9 threshold
  CHECK(labels[0].category == 1);

  engine.process(frame);
  CHECK(engine.acquisition().histogram().counts() ==
        std::vector<std::size_t>{0, 1});
}

TEST_CASE("the learning rate switches once warm-up completes") {
  EngineFixture fx;
  fx.config.acquisition.gamma = 1.01;  // everything spawns: all keyframes
  fx.config.acquisition.warmup_min_total = 2;
  fx.config.acquisition.warmup_min_ratio = 0.0;
  fx.config.learning_rate = 0.1;
  fx.config.warmup_learning_rate = 1e-9;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());

  const auto before1 = engine.pair().student();
  engine.process(EngineFixture::frame_at(0, 1.0, 0.0));
  const auto after1 = engine.pair().student();
  CHECK_FALSE(engine.acquisition().warmup_done());
  CHECK(delta_norm(before1, after1) > 0.0);
  CHECK(delta_norm(before1, after1) < 1e-6);  // warm-up rate: barely moves

  engine.process(EngineFixture::frame_at(1, 0.0, 1.0));
  CHECK_FALSE(engine.acquisition().warmup_done());  // total 2 is not > 2

  const auto before3 = engine.pair().student();
  engine.process(EngineFixture::frame_at(2, 1.0, 1.0));
  CHECK(engine.acquisition().warmup_done());  // latched before the decision
  const auto after3 = engine.pair().student();
  CHECK(delta_norm(before3, after3) > 1e-4);  // main rate: real step
}

TEST_CASE("finalized parameters blend teacher and student") {
  EngineFixture fx;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());
  for (int i = 0; i < 3; ++i)
    engine.process(EngineFixture::frame_at(i, 0.1 * i + 0.2, 1.0 - 0.1 * i));

  const auto merged = engine.finalized_params();
  const auto& teacher = engine.pair().teacher();
  const auto& student = engine.pair().student();
  REQUIRE(merged.size() == teacher.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const double expected =
        fx.config.alpha2 * teacher[i] + (1.0 - fx.config.alpha2) * student[i];
    CHECK(merged[i] == expected);
  }
}

TEST_CASE("the divergence direction changes the adaptation trajectory") {
  EngineFixture forward_fx;
  forward_fx.config.alpha1 = 0.5;  // move the teacher quickly
  forward_fx.config.learning_rate = 0.05;
  forward_fx.config.acquisition.gamma = 1.01;
  EngineFixture reverse_fx = forward_fx;
  reverse_fx.config.reverse_kl = true;

  const ToyDetector model(forward_fx.config.model);
  OnlineEngine forward(forward_fx.config, model, forward_fx.confident_source());
  OnlineEngine reverse(reverse_fx.config, model, reverse_fx.confident_source());

  // Frame 1: teacher == student, both divergence gradients vanish and the
  // trajectories coincide. Frame 2: they part ways.
  for (int i = 0; i < 2; ++i) {
    const auto f = EngineFixture::frame_at(i, i == 0 ? 1.0 : 0.0, i == 0 ? 0.0 : 1.0);
    REQUIRE(forward.process(f).adapt->updated);
    REQUIRE(reverse.process(f).adapt->updated);
  }
  CHECK(forward.pair().student() != reverse.pair().student());
}

TEST_CASE("construction rejects mismatched source parameters") {
  EngineFixture fx;
  const ToyDetector model(fx.config.model);
  CHECK_THROWS_AS(OnlineEngine(fx.config, model, ModelParams(3, 0.0)),
                  DimensionError);
}

TEST_CASE("frames are validated before processing") {
  EngineFixture fx;
  const ToyDetector model(fx.config.model);
  OnlineEngine engine(fx.config, model, fx.confident_source());

  Frame wrong_dim;
  wrong_dim.features = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(engine.process(wrong_dim), DimensionError);

  Frame bad_value;
  bad_value.features = {1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(engine.process(bad_value), DataError);
  CHECK(engine.keyframes_total() == 0);
}

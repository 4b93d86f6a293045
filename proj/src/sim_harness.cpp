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

#include "streamadapt/sim_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "streamadapt/engine.hpp"
#include "streamadapt/error.hpp"

namespace streamadapt {

using nlohmann::json;

namespace {

// splitmix64; derives independent sub-seeds for stream / pretrain / eval.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kSaltStream = 1;
constexpr std::uint64_t kSaltPretrainDraws = 2;
constexpr std::uint64_t kSaltPretrainEval = 3;
constexpr std::uint64_t kSaltTargetEval = 4;
constexpr std::uint64_t kSaltAugment = 5;

constexpr std::size_t kEvalPerCategory = 200;
constexpr std::size_t kPretrainPerCategory = 150;
constexpr double kPretrainLearningRate = 0.5;
constexpr double kPretrainAccuracyFloor = 0.95;

int sample_category(const std::vector<double>& frequencies, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double cum = 0.0;
  for (std::size_t c = 0; c < frequencies.size(); ++c) {
    cum += frequencies[c];
    if (u < cum) {
      return static_cast<int>(c);
    }
  }
  return static_cast<int>(frequencies.size()) - 1;
}

std::vector<double> gaussian_draw(const std::vector<double>& mean, double sigma,
                                  std::mt19937_64& rng) {
  std::vector<double> x = mean;
  if (sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& v : x) {
      v += gauss(rng);
    }
  }
  return x;
}

double stddev_of(const std::vector<double>& values, double mean) {
  if (values.size() < 2) {
    return 0.0;
  }
  double acc = 0.0;
  for (double v : values) {
    acc += (v - mean) * (v - mean);
  }
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

SeedStat stat_of(const std::vector<double>& values) {
  SeedStat stat;
  if (values.empty()) {
    return stat;
  }
  stat.mean = std::accumulate(values.begin(), values.end(), 0.0) /
              static_cast<double>(values.size());
  stat.stddev = stddev_of(values, stat.mean);
  return stat;
}

}  // namespace

void StreamSpec::validate() const {
  if (num_categories == 0) {
    throw DataError("stream spec: num_categories must be >= 1");
  }
  if (feature_dim == 0) {
    throw DataError("stream spec: feature_dim must be >= 1");
  }
  if (length < 1) {
    throw DataError("stream spec: length must be >= 1");
  }
  if (class_frequencies.size() != num_categories) {
    throw DataError("stream spec: class_frequencies must have num_categories entries");
  }
  double sum = 0.0;
  for (double f : class_frequencies) {
    if (f < 0.0) {
      throw DataError("stream spec: class frequencies must be >= 0");
    }
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError("stream spec: class_frequencies must sum to 1");
  }
  if (source_means.size() != num_categories || target_means.size() != num_categories) {
    throw DataError("stream spec: need one source and target mean per category");
  }
  for (const auto& m : source_means) {
    if (m.size() != feature_dim) {
      throw DataError("stream spec: source mean of wrong dimension");
    }
  }
  for (const auto& m : target_means) {
    if (m.size() != feature_dim) {
      throw DataError("stream spec: target mean of wrong dimension");
    }
  }
  if (class_sigma < 0.0 || jitter_sigma < 0.0) {
    throw DataError("stream spec: sigmas must be >= 0");
  }
  if (redundancy_rho < 0.0 || redundancy_rho >= 1.0) {
    throw DataError("stream spec: redundancy_rho must be in [0, 1)");
  }
}

json StreamSpec::to_json() const {
  json j;
  j["num_categories"] = num_categories;
  j["feature_dim"] = feature_dim;
  j["class_frequencies"] = class_frequencies;
  j["source_means"] = source_means;
  j["target_means"] = target_means;
  j["class_sigma"] = class_sigma;
  j["redundancy_rho"] = redundancy_rho;
  j["jitter_sigma"] = jitter_sigma;
  j["length"] = length;
  j["rng_seed"] = rng_seed;
  return j;
}

StreamSpec StreamSpec::from_json(const json& j) {
  StreamSpec spec;
  auto require = [&](const char* key) -> const json& {
    if (!j.contains(key)) {
      throw DataError(std::string("stream spec: missing field \"") + key + "\"");
    }
    return j.at(key);
  };
  try {
    spec.num_categories = require("num_categories").get<std::size_t>();
    spec.feature_dim = require("feature_dim").get<std::size_t>();
    spec.class_frequencies = require("class_frequencies").get<std::vector<double>>();
    spec.source_means =
        require("source_means").get<std::vector<std::vector<double>>>();
    spec.target_means =
        require("target_means").get<std::vector<std::vector<double>>>();
    spec.class_sigma = require("class_sigma").get<double>();
    spec.redundancy_rho = require("redundancy_rho").get<double>();
    spec.jitter_sigma = require("jitter_sigma").get<double>();
    spec.length = require("length").get<std::size_t>();
    if (j.contains("rng_seed")) {
      spec.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("stream spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::vector<LabeledFrame> generate_stream(const StreamSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(mix_seed(spec.rng_seed, kSaltStream));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<LabeledFrame> stream;
  stream.reserve(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t) {
    LabeledFrame labeled;
    labeled.frame.id = static_cast<std::int64_t>(t);
    const bool repeat = t > 0 && uniform(rng) < spec.redundancy_rho;
    if (repeat) {
      const LabeledFrame& prev = stream.back();
      labeled.category = prev.category;
      labeled.frame.features =
          gaussian_draw(prev.frame.features, spec.jitter_sigma, rng);
    } else {
      labeled.category = sample_category(spec.class_frequencies, rng);
      labeled.frame.features = gaussian_draw(
          spec.target_means[static_cast<std::size_t>(labeled.category)],
          spec.class_sigma, rng);
    }
    stream.push_back(std::move(labeled));
  }
  return stream;
}

EvalSet make_eval_set(const StreamSpec& spec, bool target_domain,
                      std::size_t per_category, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& means = target_domain ? spec.target_means : spec.source_means;
  EvalSet eval;
  eval.features.reserve(per_category * spec.num_categories);
  for (std::size_t c = 0; c < spec.num_categories; ++c) {
    for (std::size_t n = 0; n < per_category; ++n) {
      eval.features.push_back(gaussian_draw(means[c], spec.class_sigma, rng));
      eval.categories.push_back(static_cast<int>(c));
    }
  }
  return eval;
}

double evaluate_accuracy(const ToyDetector& model, const ModelParams& params,
                         const EvalSet& eval) {
  if (eval.features.empty()) {
    return 0.0;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < eval.features.size(); ++i) {
    const Prediction pred = model.predict(params, eval.features[i]);
    if (pred.detections()[0].category == eval.categories[i]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(eval.features.size());
}

PretrainResult pretrain_source(const StreamSpec& spec, std::size_t steps,
                               const ToyDetector& model) {
  spec.validate();
  if (steps == 0) {
    throw DataError("pretrain_source: steps must be >= 1");
  }
  if (model.feature_dim() != spec.feature_dim ||
      model.num_categories() != spec.num_categories) {
    throw DimensionError("pretrain_source: model does not match the stream spec");
  }

  // Balanced labeled source draws; held-out source set for the gate.
  std::mt19937_64 rng(mix_seed(spec.rng_seed, kSaltPretrainDraws));
  std::vector<std::vector<double>> train_x;
  std::vector<int> train_y;
  for (std::size_t c = 0; c < spec.num_categories; ++c) {
    for (std::size_t n = 0; n < kPretrainPerCategory; ++n) {
      train_x.push_back(gaussian_draw(spec.source_means[c], spec.class_sigma, rng));
      train_y.push_back(static_cast<int>(c));
    }
  }
  const EvalSet held_out = make_eval_set(spec, /*target_domain=*/false,
                                         kEvalPerCategory,
                                         mix_seed(spec.rng_seed, kSaltPretrainEval));

  ModelParams params = model.zero_params();
  std::vector<double> batch_grad(params.size());
  const double inv_n = 1.0 / static_cast<double>(train_x.size());
  for (std::size_t step = 0; step < steps; ++step) {
    std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
    for (std::size_t i = 0; i < train_x.size(); ++i) {
      const std::vector<Detection> label = {Detection{train_y[i], 1.0}};
      const LossGrad g = model.task_loss_and_gradient(params, train_x[i], label);
      for (std::size_t k = 0; k < params.size(); ++k) {
        batch_grad[k] += g.gradient[k] * inv_n;
      }
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      params[k] -= kPretrainLearningRate * batch_grad[k];
    }
  }

  PretrainResult result;
  result.source_accuracy = evaluate_accuracy(model, params, held_out);
  if (result.source_accuracy < kPretrainAccuracyFloor) {
    std::ostringstream msg;
    msg << "pretrain_source: held-out source accuracy " << result.source_accuracy
        << " below " << kPretrainAccuracyFloor
        << "; the stream spec is too hard for the toy model";
    throw PretrainError(msg.str());
  }
  result.params = std::move(params);
  return result;
}

PretrainResult pretrain_source(const StreamSpec& spec, std::size_t steps) {
  ToyDetector model(ToyDetectorConfig{spec.feature_dim, spec.feature_dim,
                                      spec.num_categories, spec.rng_seed});
  return pretrain_source(spec, steps, model);
}

json RunReport::to_json() const {
  json j;
  j["mode"] = to_string(mode);
  j["frames_total"] = frames_total;
  j["keyframes_total"] = keyframes_total;
  j["keyframes_auf"] = keyframes_auf;
  j["keyframes_arc"] = keyframes_arc;
  if (!keyframes_per_category.empty()) {
    j["keyframes_per_category"] = keyframes_per_category;
  }
  if (target_accuracy_before.has_value()) {
    j["target_accuracy_before"] = *target_accuracy_before;
  }
  if (target_accuracy_after.has_value()) {
    j["target_accuracy_after"] = *target_accuracy_after;
  }
  j["per_frame_micros_mean"] = per_frame_micros_mean;
  j["clusters_auf"] = clusters_auf;
  j["clusters_arc"] = clusters_arc;
  return j;
}

RunReport run_mode(RunMode mode, const std::vector<LabeledFrame>& stream,
                   const ModelParams& source_params, const EngineConfig& config,
                   const StreamSpec& spec) {
  if (config.model.feature_dim != spec.feature_dim ||
      config.model.num_categories != spec.num_categories) {
    throw DimensionError(
        "run_mode: engine model dimensions do not match the stream spec");
  }

  EngineConfig run_config = config;
  run_config.mode = mode;

  ToyDetector model(run_config.model);
  const EvalSet target_eval = make_eval_set(
      spec, /*target_domain=*/true, kEvalPerCategory,
      mix_seed(spec.rng_seed, kSaltTargetEval));

  RunReport report;
  report.mode = mode;
  report.frames_total = stream.size();
  report.keyframes_per_category.assign(spec.num_categories, 0);
  report.target_accuracy_before =
      evaluate_accuracy(model, source_params, target_eval);

  OnlineEngine engine(run_config, model, source_params);

  const auto start = std::chrono::steady_clock::now();
  for (const LabeledFrame& labeled : stream) {
    const FrameOutcome outcome = engine.process(labeled.frame);
    if (outcome.decision.keyframe) {
      report.keyframes_per_category[static_cast<std::size_t>(labeled.category)] += 1;
    }
  }
  const auto stop = std::chrono::steady_clock::now();

  report.keyframes_total = engine.keyframes_total();
  report.keyframes_auf = engine.keyframes_auf();
  report.keyframes_arc = engine.keyframes_arc();
  report.clusters_auf = engine.acquisition().auf_bank().size();
  report.clusters_arc = engine.acquisition().arc_bank().size();
  if (!stream.empty()) {
    const double nanos =
        static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                stop - start)
                                .count());
    report.per_frame_micros_mean = nanos / 1000.0 / static_cast<double>(stream.size());
  }

  const ModelParams final_params = engine.finalized_params();
  report.target_accuracy_after = evaluate_accuracy(model, final_params, target_eval);
  return report;
}

void SimulationSpec::validate() const {
  stream.validate();
  engine.validate();
  if (pretrain_steps == 0) {
    throw DataError("simulation spec: pretrain_steps must be >= 1");
  }
  if (!(teacher_sharpness > 0.0) || !std::isfinite(teacher_sharpness)) {
    throw DataError("simulation spec: teacher_sharpness must be finite and > 0");
  }
  if (engine.model.feature_dim != stream.feature_dim ||
      engine.model.num_categories != stream.num_categories) {
    throw DataError("simulation spec: engine model dimensions do not match the stream");
  }
}

json SimulationSpec::to_json() const {
  json j;
  j["stream"] = stream.to_json();
  j["engine"] = engine.to_json();
  j["pretrain_steps"] = pretrain_steps;
  j["teacher_sharpness"] = teacher_sharpness;
  return j;
}

SimulationSpec SimulationSpec::from_json(const json& j) {
  if (!j.is_object() || !j.contains("stream")) {
    throw DataError("simulation spec: missing \"stream\" section");
  }
  SimulationSpec spec;
  spec.stream = StreamSpec::from_json(j.at("stream"));
  if (j.contains("engine")) {
    spec.engine = EngineConfig::from_json(j.at("engine"));
  }
  if (j.contains("pretrain_steps")) {
    spec.pretrain_steps = j.at("pretrain_steps").get<std::size_t>();
  }
  if (j.contains("teacher_sharpness")) {
    spec.teacher_sharpness = j.at("teacher_sharpness").get<double>();
  }
  spec.validate();
  return spec;
}

SimulationSpec SimulationSpec::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open simulation spec: " + path);
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw DataError("simulation spec is not valid JSON: " + path);
  }
  return from_json(j);
}

namespace {

// Unit-norm target means: each category's source direction rotated by
// `shift_radians` toward the next category's direction.
std::vector<std::vector<double>> rotated_means(
    const std::vector<std::vector<double>>& source, double shift_radians) {
  const std::size_t C = source.size();
  std::vector<std::vector<double>> target(C);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& a = source[c];
    const auto& b = source[(c + 1) % C];
    target[c].resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      target[c][i] = std::cos(shift_radians) * a[i] + std::sin(shift_radians) * b[i];
    }
  }
  return target;
}

std::vector<std::vector<double>> basis_means(std::size_t num_categories,
                                             std::size_t feature_dim) {
  std::vector<std::vector<double>> means(num_categories,
                                         std::vector<double>(feature_dim, 0.0));
  for (std::size_t c = 0; c < num_categories; ++c) {
    means[c][c % feature_dim] = 1.0;
  }
  return means;
}

constexpr double kDegree = 3.14159265358979323846 / 180.0;

}  // namespace

std::optional<SimulationSpec> builtin_simulation_spec(const std::string& name) {
  if (name == "reference") {
    SimulationSpec spec;
    spec.stream.num_categories = 4;
    spec.stream.feature_dim = 16;
    spec.stream.class_frequencies = {0.5, 0.3, 0.18, 0.02};
    spec.stream.source_means = basis_means(4, 16);
    spec.stream.target_means = rotated_means(spec.stream.source_means, 25.0 * kDegree);
    spec.stream.class_sigma = 0.03;
    spec.stream.redundancy_rho = 0.9;
    spec.stream.jitter_sigma = 0.01;
    spec.stream.length = 5000;
    spec.stream.rng_seed = 0;

    spec.engine.mode = RunMode::AufArc;
    spec.engine.acquisition.gamma = 0.975;
    spec.engine.acquisition.warmup_min_total = 200;
    spec.engine.acquisition.warmup_min_ratio = 0.003;
    spec.engine.model = ToyDetectorConfig{16, 16, 4, 0};
    spec.pretrain_steps = 1000;
    return spec;
  }
  if (name == "adversarial") {
    // Heavy redundancy plus an overconfident teacher near the decision
    // boundary: adapting on every frame hammers each long run of repeats
    // and drifts the classifier, while sparse acquisition stays stable.
    SimulationSpec spec;
    spec.stream.num_categories = 4;
    spec.stream.feature_dim = 16;
    spec.stream.class_frequencies = {0.45, 0.3, 0.2, 0.05};
    spec.stream.source_means = basis_means(4, 16);
    spec.stream.target_means = rotated_means(spec.stream.source_means, 40.0 * kDegree);
    spec.stream.class_sigma = 0.08;
    spec.stream.redundancy_rho = 0.97;
    spec.stream.jitter_sigma = 0.005;
    spec.stream.length = 20000;
    spec.stream.rng_seed = 0;

    spec.engine.mode = RunMode::Auf;
    spec.engine.acquisition.gamma = 0.975;
    spec.engine.acquisition.warmup_min_total = 200;
    spec.engine.acquisition.warmup_min_ratio = 0.003;
    spec.engine.learning_rate = 0.05;
    spec.engine.model = ToyDetectorConfig{16, 16, 4, 0};
    spec.pretrain_steps = 1000;
    spec.teacher_sharpness = 3.0;
    return spec;
  }
  return std::nullopt;
}

json AblationResult::to_json() const {
  json j;
  j["seeds"] = seeds;
  j["rare_truth_category"] = rare_truth_category;
  json rows_json = json::array();
  for (const ModeStats& row : rows) {
    json r;
    r["mode"] = to_string(row.mode);
    r["accuracy_before"] = {{"mean", row.accuracy_before.mean},
                            {"stddev", row.accuracy_before.stddev}};
    r["accuracy_after"] = {{"mean", row.accuracy_after.mean},
                           {"stddev", row.accuracy_after.stddev}};
    r["keyframes"] = {{"mean", row.keyframes.mean}, {"stddev", row.keyframes.stddev}};
    r["rare_keyframes"] = {{"mean", row.rare_keyframes.mean},
                           {"stddev", row.rare_keyframes.stddev}};
    r["per_frame_micros"] = {{"mean", row.per_frame_micros.mean},
                             {"stddev", row.per_frame_micros.stddev}};
    json runs_json = json::array();
    for (const RunReport& run : row.runs) {
      runs_json.push_back(run.to_json());
    }
    r["runs"] = std::move(runs_json);
    rows_json.push_back(std::move(r));
  }
  j["modes"] = std::move(rows_json);
  return j;
}

AblationResult ablation_compare(const SimulationSpec& spec,
                                const std::vector<std::uint64_t>& seeds) {
  spec.validate();
  if (seeds.size() < 5) {
    throw DataError("ablation_compare: minimum 5 seeds, got " +
                    std::to_string(seeds.size()));
  }

  AblationResult result;
  result.seeds = seeds;
  {
    const auto& freq = spec.stream.class_frequencies;
    std::size_t rare = 0;
    for (std::size_t c = 1; c < freq.size(); ++c) {
      if (freq[c] < freq[rare]) {
        rare = c;
      }
    }
    result.rare_truth_category = static_cast<int>(rare);
  }

  const RunMode modes[] = {RunMode::NoAcquire, RunMode::Auf, RunMode::AufArc};
  for (RunMode mode : modes) {
    ModeStats stats;
    stats.mode = mode;
    result.rows.push_back(std::move(stats));
  }

  for (std::uint64_t seed : seeds) {
    StreamSpec stream_spec = spec.stream;
    stream_spec.rng_seed = seed;
    const std::vector<LabeledFrame> stream = generate_stream(stream_spec);

    ToyDetector model(spec.engine.model);
    PretrainResult source = pretrain_source(stream_spec, spec.pretrain_steps, model);
    for (double& v : source.params) {
      v *= spec.teacher_sharpness;
    }

    EngineConfig engine = spec.engine;
    engine.augment.rng_seed = mix_seed(seed, kSaltAugment);

    for (ModeStats& row : result.rows) {
      RunReport report =
          run_mode(row.mode, stream, source.params, engine, stream_spec);
      row.runs.push_back(std::move(report));
    }
  }

  for (ModeStats& row : result.rows) {
    std::vector<double> acc_before, acc_after, keyframes, rare, micros;
    for (const RunReport& run : row.runs) {
      acc_before.push_back(run.target_accuracy_before.value_or(0.0));
      acc_after.push_back(run.target_accuracy_after.value_or(0.0));
      keyframes.push_back(static_cast<double>(run.keyframes_total));
      rare.push_back(static_cast<double>(
          run.keyframes_per_category[static_cast<std::size_t>(
              result.rare_truth_category)]));
      micros.push_back(run.per_frame_micros_mean);
    }
    row.accuracy_before = stat_of(acc_before);
    row.accuracy_after = stat_of(acc_after);
    row.keyframes = stat_of(keyframes);
    row.rare_keyframes = stat_of(rare);
    row.per_frame_micros = stat_of(micros);
  }
  return result;
}

std::string format_ablation_table(const AblationResult& result) {
  std::ostringstream out;
  auto cell = [](double mean, double stddev, int precision) {
    std::ostringstream c;
    c.setf(std::ios::fixed);
    c.precision(precision);
    c << mean << " +- " << stddev;
    return c.str();
  };

  out << "seeds: " << result.seeds.size()
      << "   rare category (ground truth): " << result.rare_truth_category << "\n";
  const char* header[] = {"mode",      "acc_before", "acc_after",
                          "keyframes", "rare_kf",    "us/frame"};
  std::vector<std::vector<std::string>> table;
  table.emplace_back(std::begin(header), std::end(header));
  for (const ModeStats& row : result.rows) {
    table.push_back({to_string(row.mode),
                     cell(row.accuracy_before.mean, row.accuracy_before.stddev, 3),
                     cell(row.accuracy_after.mean, row.accuracy_after.stddev, 3),
                     cell(row.keyframes.mean, row.keyframes.stddev, 1),
                     cell(row.rare_keyframes.mean, row.rare_keyframes.stddev, 1),
                     cell(row.per_frame_micros.mean, row.per_frame_micros.stddev, 2)});
  }

  std::vector<std::size_t> widths(table[0].size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << std::string(widths[i] - row[i].size() + 2, ' ');
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace streamadapt

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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamadapt/checkpoint.hpp"
#include "streamadapt/engine.hpp"
#include "streamadapt/engine_config.hpp"
#include "streamadapt/error.hpp"
#include "streamadapt/mean_teacher.hpp"
#include "streamadapt/sim_harness.hpp"
#include "streamadapt/stream_io.hpp"
#include "streamadapt/toy_detector.hpp"

namespace streamadapt {
namespace {

using nlohmann::json;

/// Missing required inputs and similar operator mistakes; mapped to exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EngineConfig load_config(const std::string& config_path) {
  if (config_path.empty()) {
    return EngineConfig{};
  }
  return EngineConfig::load_file(config_path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot open for writing: " + path);
  }
  out << text;
  out.flush();
  if (!out) {
    throw DataError("write failed: " + path);
  }
}

void check_stream_matches_model(const Frame& first, const ToyDetector& model,
                                const std::string& path) {
  if (first.features.size() != model.feature_dim()) {
    throw DimensionError(path + ": stream dimension " +
                         std::to_string(first.features.size()) +
                         " does not match the configured feature_dim " +
                         std::to_string(model.feature_dim()));
  }
}

ModelParams params_for_model(const std::string& checkpoint_path,
                             const ToyDetector& model, std::string* name_out) {
  if (checkpoint_path.empty()) {
    if (name_out != nullptr) {
      *name_out = "toy_detector";
    }
    return model.zero_params();
  }
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  if (ckpt.params.size() != model.param_count()) {
    throw DataError("checkpoint " + checkpoint_path + " holds " +
                    std::to_string(ckpt.params.size()) +
                    " parameters but the configured model expects " +
                    std::to_string(model.param_count()));
  }
  if (name_out != nullptr) {
    *name_out = ckpt.model_name;
  }
  return std::move(ckpt.params);
}

struct SelectArgs {
  std::string config_path;
  std::string stream;
  std::string checkpoint_in;
  std::string log_out = "decisions.jsonl";
  std::string state_out;
  std::string mode;
  bool print_config = false;
};

int cmd_select(const SelectArgs& a) {
  EngineConfig config = load_config(a.config_path);
  if (!a.stream.empty()) {
    config.stream_path = a.stream;
  }
  if (!a.checkpoint_in.empty()) {
    config.checkpoint_in = a.checkpoint_in;
  }
  if (!a.mode.empty()) {
    config.mode = run_mode_from_string(a.mode);
  }
  config.validate();
  if (a.print_config) {
    std::cout << config.to_json().dump(2) << "\n";
    return 0;
  }
  if (config.stream_path.empty()) {
    throw UsageError("select: no stream given (use --stream or stream_path in the config)");
  }

  ToyDetector model(config.model);
  const ModelParams params =
      params_for_model(config.checkpoint_in, model, nullptr);
  const AcquisitionConfig acq = config.effective_acquisition();
  AcquisitionState state(model.embedding_dim(), model.num_categories());

  std::ofstream log(a.log_out, std::ios::binary);
  if (!log) {
    throw DataError("cannot open for writing: " + a.log_out);
  }

  StreamReader reader(config.stream_path);
  std::size_t frames = 0;
  std::size_t keyframes = 0;
  std::size_t from_auf = 0;
  std::size_t from_arc = 0;
  while (std::optional<Frame> frame = reader.next()) {
    if (frames == 0) {
      check_stream_matches_model(*frame, model, config.stream_path);
    }
    std::vector<Detection> labels;
    if (frame->detections.has_value()) {
      labels = filter_pseudo_labels(*frame->detections, config.confidence_threshold);
    } else {
      labels = filter_pseudo_labels(model.predict(params, frame->features).detections(),
                                    config.confidence_threshold);
    }

    AcquisitionDecision decision;
    if (config.mode == RunMode::NoAcquire) {
      decision.keyframe = true;  // selection bypassed: every frame is used
    } else {
      decision = state.process_frame(model.encode(frame->features), labels, acq);
    }

    log << decision.to_json(frame->id).dump() << "\n";
    ++frames;
    if (decision.keyframe) {
      ++keyframes;
      if (decision.source == KeyframeSource::Auf) {
        ++from_auf;
      } else if (decision.source == KeyframeSource::Arc) {
        ++from_arc;
      }
    }
  }
  log.flush();
  if (!log) {
    throw DataError("write failed: " + a.log_out);
  }

  std::cout << "frames: " << frames << "\n"
            << "keyframes: " << keyframes << " (auf " << from_auf << ", arc "
            << from_arc << ")\n"
            << "clusters: auf " << state.auf_bank().size() << ", arc "
            << state.arc_bank().size() << "\n"
            << "warmup_done: " << (state.warmup_done() ? "true" : "false") << "\n"
            << "decision log: " << a.log_out << "\n";

  if (!a.state_out.empty()) {
    write_text_file(a.state_out, state.to_json().dump(2) + "\n");
  }
  return 0;
}

struct AdaptArgs {
  std::string config_path;
  std::string stream;
  std::string checkpoint_in;
  std::string checkpoint_out;
  std::string report_out;
  std::string mode;
  bool print_config = false;
};

int cmd_adapt(const AdaptArgs& a) {
  EngineConfig config = load_config(a.config_path);
  if (!a.stream.empty()) {
    config.stream_path = a.stream;
  }
  if (!a.checkpoint_in.empty()) {
    config.checkpoint_in = a.checkpoint_in;
  }
  if (!a.checkpoint_out.empty()) {
    config.checkpoint_out = a.checkpoint_out;
  }
  if (!a.report_out.empty()) {
    config.output_path = a.report_out;
  }
  if (!a.mode.empty()) {
    config.mode = run_mode_from_string(a.mode);
  }
  config.validate();
  if (a.print_config) {
    std::cout << config.to_json().dump(2) << "\n";
    return 0;
  }
  if (config.stream_path.empty()) {
    throw UsageError("adapt: no stream given (use --stream or stream_path in the config)");
  }
  if (config.checkpoint_in.empty()) {
    throw UsageError("adapt: no input checkpoint (use --checkpoint-in)");
  }

  ToyDetector model(config.model);
  std::string model_name;
  ModelParams source = params_for_model(config.checkpoint_in, model, &model_name);
  OnlineEngine engine(config, model, std::move(source));

  StreamReader reader(config.stream_path);
  std::size_t frames = 0;
  const auto start = std::chrono::steady_clock::now();
  while (std::optional<Frame> frame = reader.next()) {
    if (frames == 0) {
      check_stream_matches_model(*frame, model, config.stream_path);
    }
    engine.process(*frame);
    ++frames;
  }
  const auto stop = std::chrono::steady_clock::now();

  RunReport report;
  report.mode = config.mode;
  report.frames_total = frames;
  report.keyframes_total = engine.keyframes_total();
  report.keyframes_auf = engine.keyframes_auf();
  report.keyframes_arc = engine.keyframes_arc();
  report.clusters_auf = engine.acquisition().auf_bank().size();
  report.clusters_arc = engine.acquisition().arc_bank().size();
  if (frames > 0) {
    const double nanos =
        static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                stop - start)
                                .count());
    report.per_frame_micros_mean = nanos / 1000.0 / static_cast<double>(frames);
  }

  if (!config.checkpoint_out.empty()) {
    Checkpoint out;
    out.model_name = model_name;
    out.params = engine.finalized_params();
    out.alpha1 = config.alpha1;
    out.alpha2 = config.alpha2;
    save_checkpoint(config.checkpoint_out, out);
  }

  const std::string report_text = report.to_json().dump(2);
  std::cout << report_text << "\n";
  if (!config.output_path.empty()) {
    write_text_file(config.output_path, report_text + "\n");
  }
  return 0;
}

struct SimulateArgs {
  std::string spec = "reference";
  std::vector<std::uint64_t> seeds;
  std::string json_out = "ablation.json";
  std::string dump_spec;
  std::string dump_stream;
  bool print_config = false;
};

int cmd_simulate(const SimulateArgs& a) {
  SimulationSpec spec;
  if (std::optional<SimulationSpec> builtin = builtin_simulation_spec(a.spec)) {
    spec = std::move(*builtin);
  } else {
    spec = SimulationSpec::load_file(a.spec);
  }
  if (a.print_config) {
    std::cout << spec.to_json().dump(2) << "\n";
    return 0;
  }
  if (!a.dump_spec.empty()) {
    write_text_file(a.dump_spec, spec.to_json().dump(2) + "\n");
  }
  if (!a.dump_stream.empty()) {
    const std::vector<LabeledFrame> labeled = generate_stream(spec.stream);
    std::vector<Frame> frames;
    frames.reserve(labeled.size());
    for (const LabeledFrame& lf : labeled) {
      frames.push_back(lf.frame);
    }
    write_stream(a.dump_stream, frames);
  }

  const std::vector<std::uint64_t> seeds =
      a.seeds.empty() ? std::vector<std::uint64_t>{0, 1, 2, 3, 4} : a.seeds;
  const AblationResult result = ablation_compare(spec, seeds);
  std::cout << format_ablation_table(result);
  if (!a.json_out.empty()) {
    write_text_file(a.json_out, result.to_json().dump(2) + "\n");
  }
  return 0;
}

struct ReportArgs {
  std::string log;
  std::string checkpoint;
  bool emit_json = false;
};

json summarize_decision_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open decision log: " + path);
  }
  std::size_t line_no = 0;
  std::size_t frames = 0;
  std::size_t keyframes = 0;
  std::size_t from_auf = 0;
  std::size_t from_arc = 0;
  std::int64_t first_keyframe = -1;
  std::int64_t last_keyframe = -1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("verdict")) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                           ": not a decision log record",
                       line_no);
    }
    ++frames;
    if (j.at("verdict").get<std::string>() == "keyframe") {
      ++keyframes;
      const std::int64_t id = j.value("frame_id", static_cast<std::int64_t>(-1));
      if (first_keyframe < 0) {
        first_keyframe = id;
      }
      last_keyframe = id;
      const std::string source = j.value("source", std::string());
      if (source == "auf") {
        ++from_auf;
      } else if (source == "arc") {
        ++from_arc;
      }
    }
  }
  json out;
  out["path"] = path;
  out["frames"] = frames;
  out["keyframes"] = keyframes;
  out["keyframes_auf"] = from_auf;
  out["keyframes_arc"] = from_arc;
  if (first_keyframe >= 0) {
    out["first_keyframe_id"] = first_keyframe;
    out["last_keyframe_id"] = last_keyframe;
  }
  return out;
}

json summarize_checkpoint(const std::string& path) {
  const Checkpoint ckpt = load_checkpoint(path);
  double norm_sq = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  if (!ckpt.params.empty()) {
    lo = hi = ckpt.params.front();
    for (double v : ckpt.params) {
      norm_sq += v * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  json out;
  out["path"] = path;
  out["model_name"] = ckpt.model_name;
  out["param_count"] = ckpt.params.size();
  out["alpha1"] = ckpt.alpha1;
  out["alpha2"] = ckpt.alpha2;
  out["l2_norm"] = std::sqrt(norm_sq);
  out["min"] = lo;
  out["max"] = hi;
  return out;
}

int cmd_report(const ReportArgs& a) {
  if (a.log.empty() && a.checkpoint.empty()) {
    throw UsageError("report: nothing to report (use --log and/or --checkpoint)");
  }
  json out = json::object();
  if (!a.log.empty()) {
    out["decision_log"] = summarize_decision_log(a.log);
  }
  if (!a.checkpoint.empty()) {
    out["checkpoint"] = summarize_checkpoint(a.checkpoint);
  }
  if (a.emit_json) {
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  if (out.contains("decision_log")) {
    const json& d = out["decision_log"];
    std::cout << "decision log " << d["path"].get<std::string>() << ":\n"
              << "  frames: " << d["frames"] << "\n"
              << "  keyframes: " << d["keyframes"] << " (auf "
              << d["keyframes_auf"] << ", arc " << d["keyframes_arc"] << ")\n";
    if (d.contains("first_keyframe_id")) {
      std::cout << "  first/last keyframe id: " << d["first_keyframe_id"] << " / "
                << d["last_keyframe_id"] << "\n";
    }
  }
  if (out.contains("checkpoint")) {
    const json& c = out["checkpoint"];
    std::cout << "checkpoint " << c["path"].get<std::string>() << ":\n"
              << "  model: " << c["model_name"].get<std::string>() << "\n"
              << "  params: " << c["param_count"] << " (l2 " << c["l2_norm"]
              << ", min " << c["min"] << ", max " << c["max"] << ")\n"
              << "  alpha1: " << c["alpha1"] << "  alpha2: " << c["alpha2"] << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Online keyframe acquisition and mean-teacher adaptation"};
  app.require_subcommand(1);

  const std::vector<std::string> mode_names = {"no_acquire", "auf", "auf_arc"};

  SelectArgs sel;
  CLI::App* select = app.add_subcommand(
      "select", "Run frame selection only and write a decision log");
  select->add_option("--config", sel.config_path, "Engine config JSON file");
  select->add_option("--stream", sel.stream, "Input stream (JSON Lines)");
  select->add_option("--checkpoint-in", sel.checkpoint_in,
                     "Model checkpoint used for pseudo-labels");
  select->add_option("--log-out", sel.log_out,
                     "Decision log output path (JSON Lines)")
      ->capture_default_str();
  select->add_option("--state-out", sel.state_out,
                     "Write the final acquisition state as JSON");
  select->add_option("--mode", sel.mode, "Run mode override")
      ->check(CLI::IsMember(mode_names));
  select->add_flag("--print-config", sel.print_config,
                   "Print the effective config and exit");

  AdaptArgs ad;
  CLI::App* adapt = app.add_subcommand(
      "adapt", "Run the full selection + adaptation loop over a stream");
  adapt->add_option("--config", ad.config_path, "Engine config JSON file");
  adapt->add_option("--stream", ad.stream, "Input stream (JSON Lines)");
  adapt->add_option("--checkpoint-in", ad.checkpoint_in, "Input model checkpoint");
  adapt->add_option("--checkpoint-out", ad.checkpoint_out,
                    "Write the finalized model checkpoint here");
  adapt->add_option("--report-out", ad.report_out, "Write the run report JSON here");
  adapt->add_option("--mode", ad.mode, "Run mode override")
      ->check(CLI::IsMember(mode_names));
  adapt->add_flag("--print-config", ad.print_config,
                  "Print the effective config and exit");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the three-mode ablation over a synthetic stream spec");
  simulate->add_option("--spec", sim.spec,
                       "Simulation spec: a JSON file or a bundled name "
                       "(reference, adversarial)")
      ->capture_default_str();
  simulate->add_option("--seeds", sim.seeds, "Seeds (default 0,1,2,3,4; minimum 5)")
      ->delimiter(',');
  simulate->add_option("--json-out", sim.json_out, "Ablation result JSON path")
      ->capture_default_str();
  simulate->add_option("--dump-spec", sim.dump_spec,
                       "Also write the resolved spec JSON here");
  simulate->add_option("--dump-stream", sim.dump_stream,
                       "Also write the generated stream (JSON Lines) here");
  simulate->add_flag("--print-config", sim.print_config,
                     "Print the resolved spec and exit");

  ReportArgs rep;
  CLI::App* report = app.add_subcommand(
      "report", "Summarize decision logs and checkpoints");
  report->add_option("--log", rep.log, "Decision log to summarize");
  report->add_option("--checkpoint", rep.checkpoint, "Checkpoint to summarize");
  report->add_flag("--emit-json", rep.emit_json, "Emit the summary as JSON");

  int rc = 0;
  select->callback([&]() { rc = cmd_select(sel); });
  adapt->callback([&]() { rc = cmd_adapt(ad); });
  simulate->callback([&]() { rc = cmd_simulate(sim); });
  report->callback([&]() { rc = cmd_report(rep); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc) - 1 : 0);
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run_cli(args);
}

}  // namespace streamadapt

/*
 * Copyright 2026 The radfall Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11/CLI11.hpp>
#include <nlohmann/json.hpp>

#include "radfall/radfall.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& message) { throw Failure{kExitUsage, "usage", message}; }

void check(rf_status status) {
  if (status == RF_OK) return;
  int code = kExitData;
  if (status == RF_ERR_INVALID_ARGUMENT) code = kExitUsage;
  if (status == RF_ERR_NUMERICAL) code = kExitNumerical;
  throw Failure{code, rf_status_name(status), rf_last_error()};
}

// Owns a string allocated by the library.
std::string take_string(char* text) {
  std::string out = text ? text : "";
  rf_string_free(text);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Stream = Handle<rf_stream, rf_stream_free>;
using Labels = Handle<rf_labels, rf_labels_free>;
using Patterns = Handle<rf_patterns, rf_patterns_free>;
using Model = Handle<rf_model, rf_model_free>;
using Scores = Handle<rf_scores, rf_scores_free>;
using Detections = Handle<rf_detections, rf_detections_free>;
using Roc = Handle<rf_roc, rf_roc_free>;

enum class Kind { Text, Integer, Real, Switch };

struct FlagSpec {
  std::string key;
  std::string flag;
  Kind kind;
  std::string help;
};

/// One subcommand: defaults, required keys and the flags that override them.
struct Command {
  std::string name;
  std::string help;
  json defaults;
  std::vector<std::string> required;
  std::vector<FlagSpec> flags;
  std::string config_path{};
  std::vector<std::string> values{};
  std::vector<bool> switches{};
  CLI::App* app = nullptr;
};

json library_defaults(rf_status (*fn)(char**)) {
  char* text = nullptr;
  check(fn(&text));
  return json::parse(take_string(text));
}

json* at_path(json& root, const std::string& dotted) {
  json* node = &root;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

void merge_known(json& target, const json& source, const std::string& prefix) {
  for (const auto& item : source.items()) {
    const std::string name = prefix + item.key();
    if (!target.contains(item.key())) usage_error("unknown config key '" + name + "'");
    json& slot = target[item.key()];
    // Objects with fixed keys merge per key; "recipe" and similar free-form values replace.
    if (slot.is_object() && !slot.empty() && item.value().is_object())
      merge_known(slot, item.value(), name + ".");
    else
      slot = item.value();
  }
}

json read_config_file(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw Failure{kExitData, "io", "cannot open config file: " + path};
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Failure{kExitData, "parse", "config file " + path + ": " + e.what()};
  }
  if (!j.is_object()) usage_error("config file must hold a JSON object");
  if (j.contains(command) && j[command].is_object()) return j[command];
  return j;
}

json resolve(Command& cmd) {
  json resolved = cmd.defaults;
  if (!cmd.config_path.empty()) merge_known(resolved, read_config_file(cmd.config_path, cmd.name), "");
  for (std::size_t i = 0; i < cmd.flags.size(); ++i) {
    const FlagSpec& spec = cmd.flags[i];
    json* slot = at_path(resolved, spec.key);
    if (slot == nullptr) usage_error("internal flag mapping for " + spec.flag);
    if (spec.kind == Kind::Switch) {
      if (cmd.switches[i]) *slot = true;
      continue;
    }
    const std::string& text = cmd.values[i];
    if (text.empty()) continue;
    try {
      std::size_t used = 0;
      switch (spec.kind) {
        case Kind::Text: *slot = text; used = text.size(); break;
        case Kind::Integer: *slot = std::stoll(text, &used); break;
        case Kind::Real: *slot = std::stod(text, &used); break;
        case Kind::Switch: break;
      }
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      usage_error("bad value '" + text + "' for " + spec.flag);
    }
  }
  for (const auto& key : cmd.required) {
    const json* slot = at_path(resolved, key);
    if (slot == nullptr || slot->is_null()) usage_error("'" + key + "' is required (flag or config file)");
  }
  return resolved;
}

std::string text_of(const json& j, const char* key) {
  if (!j.at(key).is_string()) usage_error(std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

double real_of(const json& j, const char* key) {
  if (!j.at(key).is_number()) usage_error(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::int64_t integer_of(const json& j, const char* key) {
  if (!j.at(key).is_number_integer()) usage_error(std::string("'") + key + "' must be an integer");
  return j.at(key).get<std::int64_t>();
}

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

void require_inputs(const json& j, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (j.at(key).is_null()) continue;
    const std::string path = text_of(j, key);
    if (!fs::is_regular_file(path)) throw Failure{kExitData, "io", std::string(key) + " file not found: " + path};
  }
}

fs::path prepare_output(const json& resolved) {
  const fs::path dir = text_of(resolved, "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Failure{kExitData, "io", "cannot create output directory: " + dir.string()};
  std::ofstream out(dir / "config.json", std::ios::trunc);
  out << resolved.dump(2) << '\n';
  if (!out) throw Failure{kExitData, "io", "cannot write " + (dir / "config.json").string()};
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure{kExitData, "io", "cannot write " + path.string()};
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void read_stream(const json& j, const char* key, Stream& stream) {
  const bool filter = !j.at("target").is_null();
  check(rf_stream_read(text_of(j, key).c_str(), filter ? 1 : 0, filter ? integer_of(j, "target") : 0, stream.out()));
}

// ---- subcommands ----------------------------------------------------------

void run_simulate(const json& j) {
  json request = {{"seed", integer_of(j, "seed")},
                  {"tilt", radians(real_of(j, "tilt_deg"))},
                  {"height", real_of(j, "height")},
                  {"simulator", j.at("simulator")}};
  if (!j.at("recipe").is_null()) {
    request["recipe"] = j.at("recipe");
  } else {
    request["preset"] = j.at("preset");
    request["scale"] = j.at("scale");
  }
  const fs::path dir = prepare_output(j);
  Stream stream;
  Labels labels;
  char* segments = nullptr;
  check(rf_simulate(request.dump().c_str(), stream.out(), labels.out(), &segments));
  write_text(dir / "segments.json", take_string(segments));
  check(rf_stream_write(stream.get(), (dir / "stream.jsonl").string().c_str()));
  check(rf_labels_write(labels.get(), (dir / "labels.json").string().c_str()));
  std::cout << "frames " << rf_stream_size(stream.get()) << ", falls " << rf_labels_size(labels.get()) << '\n';
}

void run_preprocess(const json& j) {
  require_inputs(j, {"stream"});
  json request = {{"tilt", radians(real_of(j, "tilt_deg"))},
                  {"height", real_of(j, "height")},
                  {"length", integer_of(j, "length")},
                  {"points", integer_of(j, "points")},
                  {"stride", integer_of(j, "stride")},
                  {"seed", integer_of(j, "seed")}};
  Stream stream;
  read_stream(j, "stream", stream);
  const fs::path dir = prepare_output(j);
  Patterns patterns;
  check(rf_patterns_build(stream.get(), request.dump().c_str(), patterns.out()));
  check(rf_patterns_write(patterns.get(), (dir / "patterns.jsonl").string().c_str()));
  std::cout << "patterns " << rf_patterns_size(patterns.get()) << '\n';
}

void report_epoch(int epoch, double loss, void* user) {
  if (*static_cast<const bool*>(user)) return;
  std::cerr << "epoch " << epoch << " loss " << format_real(loss) << '\n';
}

void run_train(json& j) {
  require_inputs(j, {"patterns"});
  Patterns patterns;
  check(rf_patterns_read(text_of(j, "patterns").c_str(), patterns.out()));
  int length = 0;
  int points = 0;
  check(rf_patterns_shape(patterns.get(), &length, &points));
  j["model"]["length"] = length;
  j["model"]["points"] = points;
  j["model"]["seed"] = integer_of(j, "seed");
  const fs::path dir = prepare_output(j);
  const bool quiet = j.at("quiet").get<bool>();
  Model model;
  check(rf_model_train(patterns.get(), j["model"].dump().c_str(), report_epoch, const_cast<bool*>(&quiet),
                       model.out()));
  check(rf_model_save(model.get(), (dir / "weights.json").string().c_str()));
  std::size_t n = 0;
  check(rf_model_loss_history(model.get(), nullptr, 0, &n));
  std::vector<double> history(n);
  check(rf_model_loss_history(model.get(), history.data(), n, &n));
  std::string csv = "epoch,loss\n";
  for (std::size_t i = 0; i < n; ++i) csv += std::to_string(i + 1) + "," + format_real(history[i]) + "\n";
  write_text(dir / "loss_history.csv", csv);
  if (n > 0) std::cout << "final loss " << format_real(history.back()) << '\n';
}

void run_score(const json& j) {
  require_inputs(j, {"weights", "patterns"});
  Model model;
  check(rf_model_load(text_of(j, "weights").c_str(), model.out()));
  if (j.at("posterior_mean").get<bool>()) check(rf_model_set_posterior_mean(model.get(), 1));
  Patterns patterns;
  check(rf_patterns_read(text_of(j, "patterns").c_str(), patterns.out()));
  const fs::path dir = prepare_output(j);
  Scores scores;
  check(rf_score(model.get(), patterns.get(), static_cast<std::uint64_t>(integer_of(j, "seed")), scores.out()));
  check(rf_scores_write(scores.get(), (dir / "scores.csv").string().c_str()));
  std::cout << "windows " << rf_scores_size(scores.get()) << '\n';
}

void run_detect(json& j) {
  require_inputs(j, {"scores", "reference_scores"});
  if (j.at("anomaly_threshold").is_null()) {
    if (j.at("reference_scores").is_null())
      usage_error("give anomaly_threshold or reference_scores to calibrate it");
    Scores reference;
    check(rf_scores_read(text_of(j, "reference_scores").c_str(), reference.out()));
    double threshold = 0.0;
    check(rf_scores_quantile(reference.get(), real_of(j, "reference_quantile"), &threshold));
    j["anomaly_threshold"] = threshold;
  }
  Scores scores;
  check(rf_scores_read(text_of(j, "scores").c_str(), scores.out()));
  const fs::path dir = prepare_output(j);
  Detections detections;
  check(rf_detect(scores.get(), real_of(j, "anomaly_threshold"), real_of(j, "drop_threshold"), detections.out()));
  check(rf_detections_write(detections.get(), (dir / "detections.jsonl").string().c_str()));
  std::cout << "windows " << rf_detections_size(detections.get()) << ", fall detections "
            << rf_detections_falls(detections.get()) << '\n';
}

void run_eval(json& j) {
  require_inputs(j, {"scores", "labels"});
  if (j.at("half_window").is_null()) j["half_window"] = std::llround(0.5 * real_of(j, "fps"));
  Scores scores;
  check(rf_scores_read(text_of(j, "scores").c_str(), scores.out()));
  Labels labels;
  check(rf_labels_read(text_of(j, "labels").c_str(), labels.out()));
  const fs::path dir = prepare_output(j);
  Roc roc;
  check(rf_evaluate(scores.get(), labels.get(), real_of(j, "drop_threshold"), integer_of(j, "half_window"),
                    roc.out()));
  check(rf_roc_write_csv(roc.get(), (dir / "roc.csv").string().c_str()));
  check(rf_roc_write_svg(roc.get(), text_of(j, "title").c_str(), (dir / "roc.svg").string().c_str()));
  char* summary = nullptr;
  check(rf_roc_summary_json(roc.get(), &summary));
  write_text(dir / "summary.json", take_string(summary));
  double area = 0.0;
  check(rf_roc_auc(roc.get(), &area));
  std::cout << "labels " << rf_labels_size(labels.get()) << ", auc " << format_real(area) << '\n';
}

void run_plot(const json& j) {
  require_inputs(j, {"scores", "stream", "labels"});
  Scores scores;
  check(rf_scores_read(text_of(j, "scores").c_str(), scores.out()));
  Stream stream;
  if (!j.at("stream").is_null()) read_stream(j, "stream", stream);
  Labels labels;
  if (!j.at("labels").is_null()) check(rf_labels_read(text_of(j, "labels").c_str(), labels.out()));
  const fs::path dir = prepare_output(j);
  check(rf_plot_trace(stream.get(), scores.get(), labels.get(), text_of(j, "title").c_str(),
                      (dir / "trace.svg").string().c_str()));
}

std::vector<Command> commands() {
  const json model = library_defaults(rf_model_default_config_json);
  const json simulator = library_defaults(rf_simulator_default_config_json);
  const FlagSpec out{"out", "--out", Kind::Text, "output directory"};
  const FlagSpec tilt{"tilt_deg", "--tilt-deg", Kind::Real, "radar tilt in degrees"};
  const FlagSpec height{"height", "--height", Kind::Real, "radar height in meters"};
  const FlagSpec target{"target", "--target", Kind::Integer, "keep only this target id"};
  return {
      {"simulate",
       "Generate a synthetic radar stream with fall labels",
       {{"out", nullptr}, {"seed", nullptr}, {"tilt_deg", 10.0}, {"height", 2.0}, {"preset", "single"},
        {"scale", 1}, {"recipe", nullptr}, {"simulator", simulator}},
       {"out", "seed"},
       {out,
        {"seed", "--seed", Kind::Integer, "random seed"},
        tilt,
        height,
        {"preset", "--preset", Kind::Text, "recipe preset: adl, single or benchmark"},
        {"scale", "--scale", Kind::Integer, "preset repetition factor"}}},
      {"preprocess",
       "Cut a stream into fixed-size motion patterns",
       {{"stream", nullptr}, {"out", nullptr}, {"target", nullptr}, {"tilt_deg", 10.0}, {"height", 2.0},
        {"length", 10}, {"points", 64}, {"stride", 1}, {"seed", 0}},
       {"stream", "out"},
       {{"stream", "--stream", Kind::Text, "stream JSON Lines file"},
        out,
        target,
        tilt,
        height,
        {"length", "--length", Kind::Integer, "frames per pattern"},
        {"points", "--points", Kind::Integer, "points per frame after oversampling"},
        {"stride", "--stride", Kind::Integer, "frames between pattern starts"},
        {"seed", "--seed", Kind::Integer, "subsampling seed"}}},
      {"train",
       "Train an autoencoder on normal-activity patterns",
       {{"patterns", nullptr}, {"out", nullptr}, {"seed", nullptr}, {"quiet", false}, {"model", model}},
       {"patterns", "out", "seed"},
       {{"patterns", "--patterns", Kind::Text, "training patterns file"},
        out,
        {"seed", "--seed", Kind::Integer, "training seed"},
        {"quiet", "--quiet", Kind::Switch, "do not print per-epoch loss"},
        {"model.loss_variant", "--variant", Kind::Text, "full, simplified or rae"},
        {"model.epochs", "--epochs", Kind::Integer, "training epochs"},
        {"model.batch_size", "--batch-size", Kind::Integer, "patterns per batch"},
        {"model.learning_rate", "--learning-rate", Kind::Real, "Adam step size"},
        {"model.latent", "--latent", Kind::Integer, "latent dimension"},
        {"model.standardize", "--standardize", Kind::Switch, "standardize inputs with training statistics"}}},
      {"score",
       "Score every pattern with a trained model",
       {{"weights", nullptr}, {"patterns", nullptr}, {"out", nullptr}, {"seed", 0}, {"posterior_mean", false}},
       {"weights", "patterns", "out"},
       {{"weights", "--weights", Kind::Text, "weights file"},
        {"patterns", "--patterns", Kind::Text, "patterns file"},
        out,
        {"seed", "--seed", Kind::Integer, "sampling seed"},
        {"posterior_mean", "--posterior-mean", Kind::Switch, "score with the posterior mean, no sampling"}}},
      {"detect",
       "Apply the anomaly and centroid-drop thresholds",
       {{"scores", nullptr}, {"out", nullptr}, {"anomaly_threshold", nullptr}, {"reference_scores", nullptr},
        {"reference_quantile", 0.99}, {"drop_threshold", 0.6}},
       {"scores", "out"},
       {{"scores", "--scores", Kind::Text, "scores CSV"},
        out,
        {"anomaly_threshold", "--anomaly-threshold", Kind::Real, "anomaly threshold"},
        {"reference_scores", "--reference-scores", Kind::Text, "normal-activity scores used to set the threshold"},
        {"reference_quantile", "--reference-quantile", Kind::Real, "quantile of the reference scores"},
        {"drop_threshold", "--drop-threshold", Kind::Real, "centroid drop threshold in meters"}}},
      {"eval",
       "Sweep the anomaly threshold against ground truth",
       {{"scores", nullptr}, {"labels", nullptr}, {"out", nullptr}, {"drop_threshold", 0.6}, {"fps", 10.0},
        {"half_window", nullptr}, {"title", "ROC"}},
       {"scores", "labels", "out"},
       {{"scores", "--scores", Kind::Text, "scores CSV"},
        {"labels", "--labels", Kind::Text, "label file"},
        out,
        {"drop_threshold", "--drop-threshold", Kind::Real, "centroid drop threshold in meters"},
        {"fps", "--fps", Kind::Real, "frame rate used to derive the matching window"},
        {"half_window", "--half-window", Kind::Integer, "matching half window in frames"},
        {"title", "--title", Kind::Text, "plot title"}}},
      {"plot",
       "Plot anomaly score and centroid height over time",
       {{"scores", nullptr}, {"stream", nullptr}, {"labels", nullptr}, {"target", nullptr}, {"out", nullptr},
        {"title", "anomaly trace"}},
       {"scores", "out"},
       {{"scores", "--scores", Kind::Text, "scores CSV"},
        {"stream", "--stream", Kind::Text, "stream file for the centroid height"},
        {"labels", "--labels", Kind::Text, "label file for fall markers"},
        target,
        out,
        {"title", "--title", Kind::Text, "plot title"}}},
  };
}

void print_failure(const Failure& f) {
  json line = {{"error", f.kind}, {"exit", f.code}, {"message", f.message}};
  std::cerr << line.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Command> cmds;
  try {
    cmds = commands();
  } catch (const Failure& f) {
    print_failure(f);
    return f.code;
  }
  CLI::App app{"Radar fall detection pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rf_version()));
  for (auto& cmd : cmds) {
    cmd.app = app.add_subcommand(cmd.name, cmd.help);
    cmd.app->add_option("--config", cmd.config_path, "JSON config file; flags override it");
    cmd.values.assign(cmd.flags.size(), "");
    cmd.switches.assign(cmd.flags.size(), false);
    for (std::size_t i = 0; i < cmd.flags.size(); ++i) {
      const FlagSpec& spec = cmd.flags[i];
      if (spec.kind == Kind::Switch) {
        cmd.app->add_flag_callback(spec.flag, [&cmd, i] { cmd.switches[i] = true; }, spec.help);
      } else {
        cmd.app->add_option(spec.flag, cmd.values[i], spec.help);
      }
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_failure({kExitUsage, "usage", e.what()});
    return kExitUsage;
  }
  try {
    for (auto& cmd : cmds) {
      if (!cmd.app->parsed()) continue;
      json resolved = resolve(cmd);
      if (cmd.name == "simulate") run_simulate(resolved);
      if (cmd.name == "preprocess") run_preprocess(resolved);
      if (cmd.name == "train") run_train(resolved);
      if (cmd.name == "score") run_score(resolved);
      if (cmd.name == "detect") run_detect(resolved);
      if (cmd.name == "eval") run_eval(resolved);
      if (cmd.name == "plot") run_plot(resolved);
    }
  } catch (const Failure& f) {
    print_failure(f);
    return f.code;
  } catch (const json::exception& e) {
    print_failure({kExitUsage, "usage", e.what()});
    return kExitUsage;
  }
  return 0;
}

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

#include "radfall/radfall.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/detector.hpp"
#include "core/evaluation.hpp"
#include "core/plots.hpp"
#include "core/scoring.hpp"
#include "core/simulator.hpp"
#include "core/training.hpp"

using nlohmann::json;
using namespace radfall;

struct rf_stream {
  std::vector<io::RadarFrame> frames;
};
struct rf_labels {
  io::GroundTruthLabel labels;
};
struct rf_patterns {
  std::vector<prep::MotionPattern> patterns;
};
struct rf_model {
  model::HvraeModel model;
  std::vector<double> loss_history;
};
struct rf_scores {
  std::vector<detect::WindowScore> scores;
};
struct rf_detections {
  std::vector<detect::DetectionEvent> events;
};
struct rf_roc {
  std::vector<eval::RocPoint> points;
  std::size_t labels = 0;
  std::int64_t half_window = 0;
  double drop_threshold = 0.0;
};

namespace {

thread_local std::string last_error;

rf_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return RF_ERR_INVALID_ARGUMENT;
    case ErrorKind::Io: return RF_ERR_IO;
    case ErrorKind::Parse: return RF_ERR_PARSE;
    case ErrorKind::Format: return RF_ERR_FORMAT;
    case ErrorKind::Version: return RF_ERR_VERSION;
    case ErrorKind::Domain: return RF_ERR_DOMAIN;
    case ErrorKind::Numerical: return RF_ERR_NUMERICAL;
  }
  return RF_ERR_INTERNAL;
}

template <typename Fn>
rf_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return RF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    last_error = e.what();
    return RF_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RF_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::InvalidArgument, std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_object(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json::object();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string(what) + ": " + e.what());
  }
  require(j.is_object(), ErrorKind::Format, std::string(what) + " must be a JSON object");
  return j;
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("key '") + key + "': " + e.what());
  }
}

std::vector<std::pair<const char*, double*>> simulator_fields(sim::SimulatorConfig& c) {
  return {
      {"fps", &c.fps},
      {"standing_height", &c.standing.centroid_height},
      {"lying_height", &c.lying_height},
      {"lying_long_spread", &c.lying_long_spread},
      {"lying_short_spread", &c.lying_short_spread},
      {"fall_duration", &c.fall_duration},
      {"fall_shift", &c.fall_shift},
      {"lying_duration", &c.lying_duration},
      {"getup_duration", &c.getup_duration},
      {"sit_height", &c.sitting.centroid_height},
      {"sit_duration", &c.sit_duration},
      {"sit_hold", &c.sit_hold},
      {"sit_rise", &c.sit_rise},
      {"crouch_height", &c.crouching.centroid_height},
      {"crouch_duration", &c.crouch_duration},
      {"crouch_hold", &c.crouch_hold},
      {"crouch_rise", &c.crouch_rise},
      {"bend_height", &c.bending.centroid_height},
      {"bend_duration", &c.bend_duration},
      {"bend_hold", &c.bend_hold},
      {"bend_rise", &c.bend_rise},
      {"jump_height", &c.jump_height},
      {"jump_duration", &c.jump_duration},
      {"jump_crouch", &c.jump_crouch},
      {"jump_absorb", &c.jump_absorb},
      {"jump_dip", &c.jump_dip},
      {"jump_reach", &c.jump_reach},
      {"settle", &c.settle},
      {"mean_points", &c.mean_points},
      {"doppler_noise", &c.doppler_noise},
      {"limb_swing", &c.limb_swing},
      {"walk_speed_min", &c.walk_speed_min},
      {"walk_speed_max", &c.walk_speed_max},
      {"walk_segment_min", &c.walk_segment_min},
      {"walk_segment_max", &c.walk_segment_max},
      {"gait_bob", &c.gait_bob},
      {"duration_jitter", &c.duration_jitter},
      {"height_jitter", &c.height_jitter},
      {"room_x_min", &c.room_x_min},
      {"room_x_max", &c.room_x_max},
      {"room_y_min", &c.room_y_min},
      {"room_y_max", &c.room_y_max},
  };
}

void apply_simulator_overrides(const json& j, sim::SimulatorConfig& c) {
  auto fields = simulator_fields(c);
  for (const auto& item : j.items()) {
    auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return item.key() == f.first; });
    require(it != fields.end(), ErrorKind::Format, "unknown simulator key '" + item.key() + "'");
    require(item.value().is_number(), ErrorKind::Format, "simulator key '" + item.key() + "' must be a number");
    *it->second = item.value().get<double>();
  }
  sim::validate(c);
}

}  // namespace

extern "C" {

const char* rf_last_error(void) { return last_error.c_str(); }

const char* rf_status_name(rf_status status) {
  switch (status) {
    case RF_OK: return "ok";
    case RF_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RF_ERR_IO: return "io";
    case RF_ERR_PARSE: return "parse";
    case RF_ERR_FORMAT: return "format";
    case RF_ERR_VERSION: return "version";
    case RF_ERR_DOMAIN: return "domain";
    case RF_ERR_NUMERICAL: return "numerical";
    case RF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rf_version(void) { return "0.1.0"; }

void rf_string_free(char* text) { std::free(text); }

rf_status rf_model_default_config_json(char** out) {
  return guarded([&] {
    need(out, "out");
    *out = copy_string(model::config_to_json(model::HvraeConfig{}));
  });
}

rf_status rf_simulator_default_config_json(char** out) {
  return guarded([&] {
    need(out, "out");
    sim::SimulatorConfig c;
    json j = json::object();
    for (const auto& [name, value] : simulator_fields(c)) j[name] = *value;
    *out = copy_string(j.dump());
  });
}

// ---- streams and labels ---------------------------------------------------

rf_status rf_stream_read(const char* path, int filter_target, int64_t target_id, rf_stream** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto s = std::make_unique<rf_stream>();
    s->frames = io::read_stream(path, filter_target ? std::optional<std::int64_t>(target_id) : std::nullopt);
    *out = s.release();
  });
}

rf_status rf_stream_write(const rf_stream* stream, const char* path) {
  return guarded([&] {
    need(stream, "stream");
    need(path, "path");
    io::write_stream(stream->frames, path);
  });
}

size_t rf_stream_size(const rf_stream* stream) { return stream ? stream->frames.size() : 0; }

rf_status rf_stream_frame(const rf_stream* stream, size_t i, int64_t* frame_index, double* height) {
  return guarded([&] {
    need(stream, "stream");
    require(i < stream->frames.size(), ErrorKind::InvalidArgument, "frame index out of range");
    if (frame_index) *frame_index = stream->frames[i].frame_index;
    if (height) *height = stream->frames[i].centroid.z();
  });
}

void rf_stream_free(rf_stream* stream) { delete stream; }

rf_status rf_labels_read(const char* path, rf_labels** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto l = std::make_unique<rf_labels>();
    l->labels = io::read_labels(path);
    *out = l.release();
  });
}

rf_status rf_labels_write(const rf_labels* labels, const char* path) {
  return guarded([&] {
    need(labels, "labels");
    need(path, "path");
    io::write_labels(labels->labels, path);
  });
}

size_t rf_labels_size(const rf_labels* labels) { return labels ? labels->labels.fall_frame_indices.size() : 0; }

int64_t rf_labels_get(const rf_labels* labels, size_t i) {
  if (!labels || i >= labels->labels.fall_frame_indices.size()) return -1;
  return labels->labels.fall_frame_indices[i];
}

void rf_labels_free(rf_labels* labels) { delete labels; }

// ---- simulation -----------------------------------------------------------

rf_status rf_simulate(const char* config_json, rf_stream** frames, rf_labels** labels, char** segments_json) {
  return guarded([&] {
    need(frames, "frames");
    need(labels, "labels");
    const json cfg = parse_object(config_json, "simulation config");
    for (const auto& item : cfg.items()) {
      static const char* known[] = {"seed", "tilt", "height", "recipe", "preset", "scale", "simulator"};
      require(std::find(std::begin(known), std::end(known), item.key()) != std::end(known), ErrorKind::Format,
              "unknown simulation key '" + item.key() + "'");
    }
    require(cfg.contains("seed"), ErrorKind::InvalidArgument, "simulation needs a seed");
    prep::RadarPose pose{value_or(cfg, "tilt", 0.17453292519943295), value_or(cfg, "height", 2.0)};
    sim::Recipe recipe;
    if (cfg.contains("recipe")) {
      require(!cfg.contains("preset"), ErrorKind::InvalidArgument, "give either 'recipe' or 'preset', not both");
      require(cfg["recipe"].is_object(), ErrorKind::Format, "'recipe' must map motion names to counts");
      for (const auto& item : cfg["recipe"].items()) {
        require(item.value().is_number_integer(), ErrorKind::Format, "recipe counts must be integers");
        recipe.emplace_back(sim::motion_from_string(item.key()), item.value().get<int>());
      }
    } else {
      recipe = sim::preset_recipe(value_or<std::string>(cfg, "preset", "single"), value_or(cfg, "scale", 1));
    }
    sim::SimulatorConfig sc;
    if (cfg.contains("simulator")) {
      require(cfg["simulator"].is_object(), ErrorKind::Format, "'simulator' must be an object");
      apply_simulator_overrides(cfg["simulator"], sc);
    }
    auto ds = sim::generate_dataset(recipe, pose, value_or<std::uint64_t>(cfg, "seed", 0), sc);
    auto s = std::make_unique<rf_stream>();
    auto l = std::make_unique<rf_labels>();
    s->frames = std::move(ds.frames);
    l->labels = std::move(ds.labels);
    if (segments_json) {
      json arr = json::array();
      for (const auto& seg : ds.segments) {
        json j{{"name", seg.name}, {"start", seg.start_frame}, {"end", seg.end_frame}};
        if (seg.fall_frame) j["fall"] = *seg.fall_frame;
        arr.push_back(j);
      }
      *segments_json = copy_string(arr.dump(1) + "\n");
    }
    *frames = s.release();
    *labels = l.release();
  });
}

// ---- preprocessing --------------------------------------------------------

rf_status rf_patterns_build(const rf_stream* stream, const char* config_json, rf_patterns** out) {
  return guarded([&] {
    need(stream, "stream");
    need(out, "out");
    const json cfg = parse_object(config_json, "preprocess config");
    prep::PreprocessConfig pc;
    for (const auto& item : cfg.items()) {
      static const char* known[] = {"tilt", "height", "length", "points", "stride", "seed"};
      require(std::find(std::begin(known), std::end(known), item.key()) != std::end(known), ErrorKind::Format,
              "unknown preprocess key '" + item.key() + "'");
    }
    pc.pose.tilt = value_or(cfg, "tilt", pc.pose.tilt);
    pc.pose.height = value_or(cfg, "height", pc.pose.height);
    pc.length = value_or(cfg, "length", pc.length);
    pc.points = value_or(cfg, "points", pc.points);
    pc.stride = value_or(cfg, "stride", pc.stride);
    pc.seed = value_or(cfg, "seed", pc.seed);
    auto p = std::make_unique<rf_patterns>();
    p->patterns = prep::build_motion_patterns(stream->frames, pc);
    *out = p.release();
  });
}

rf_status rf_patterns_read(const char* path, rf_patterns** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto p = std::make_unique<rf_patterns>();
    p->patterns = prep::read_patterns(path);
    *out = p.release();
  });
}

rf_status rf_patterns_write(const rf_patterns* patterns, const char* path) {
  return guarded([&] {
    need(patterns, "patterns");
    need(path, "path");
    prep::write_patterns(patterns->patterns, path);
  });
}

size_t rf_patterns_size(const rf_patterns* patterns) { return patterns ? patterns->patterns.size() : 0; }

rf_status rf_patterns_shape(const rf_patterns* patterns, int* length, int* points) {
  return guarded([&] {
    need(patterns, "patterns");
    require(!patterns->patterns.empty(), ErrorKind::Domain, "pattern set is empty");
    if (length) *length = patterns->patterns.front().length();
    if (points) *points = patterns->patterns.front().points();
  });
}

void rf_patterns_free(rf_patterns* patterns) { delete patterns; }

// ---- models ---------------------------------------------------------------

rf_status rf_model_train(const rf_patterns* patterns, const char* config_json, rf_epoch_callback on_epoch,
                         void* user, rf_model** out) {
  return guarded([&] {
    need(patterns, "patterns");
    need(out, "out");
    const std::string text = (config_json && *config_json) ? config_json : "{}";
    const model::HvraeConfig config = model::config_from_json(text);
    model::EpochCallback cb;
    if (on_epoch) cb = [on_epoch, user](int epoch, double loss) { on_epoch(epoch, loss, user); };
    auto result = model::train(patterns->patterns, config, cb);
    auto m = std::make_unique<rf_model>();
    m->model = std::move(result.model);
    m->loss_history = std::move(result.epoch_loss);
    *out = m.release();
  });
}

rf_status rf_model_load(const char* path, rf_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto m = std::make_unique<rf_model>();
    m->model = model::load_weights(path);
    *out = m.release();
  });
}

rf_status rf_model_save(const rf_model* m, const char* path) {
  return guarded([&] {
    need(m, "model");
    need(path, "path");
    model::save_weights(m->model, path);
  });
}

rf_status rf_model_loss_history(const rf_model* m, double* values, size_t capacity, size_t* length) {
  return guarded([&] {
    need(m, "model");
    const std::size_t n = m->loss_history.size();
    if (length) *length = n;
    if (values) std::copy_n(m->loss_history.begin(), std::min(n, capacity), values);
  });
}

rf_status rf_model_config_json(const rf_model* m, char** out) {
  return guarded([&] {
    need(m, "model");
    need(out, "out");
    *out = copy_string(model::config_to_json(m->model.config()));
  });
}

rf_status rf_model_set_posterior_mean(rf_model* m, int enabled) {
  return guarded([&] {
    need(m, "model");
    m->model.mutable_config().posterior_mean = enabled != 0;
  });
}

void rf_model_free(rf_model* m) { delete m; }

// ---- scoring and detection ------------------------------------------------

rf_status rf_score(rf_model* m, const rf_patterns* patterns, uint64_t seed, rf_scores** out) {
  return guarded([&] {
    need(m, "model");
    need(patterns, "patterns");
    need(out, "out");
    auto s = std::make_unique<rf_scores>();
    s->scores = model::score_patterns(patterns->patterns, m->model, seed);
    *out = s.release();
  });
}

rf_status rf_scores_read(const char* path, rf_scores** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    auto s = std::make_unique<rf_scores>();
    s->scores = detect::read_scores(path);
    *out = s.release();
  });
}

rf_status rf_scores_write(const rf_scores* scores, const char* path) {
  return guarded([&] {
    need(scores, "scores");
    need(path, "path");
    detect::write_scores(scores->scores, path);
  });
}

size_t rf_scores_size(const rf_scores* scores) { return scores ? scores->scores.size() : 0; }

rf_status rf_scores_get(const rf_scores* scores, size_t i, int64_t* frame_index, double* anomaly, double* drop) {
  return guarded([&] {
    need(scores, "scores");
    require(i < scores->scores.size(), ErrorKind::InvalidArgument, "score index out of range");
    const auto& s = scores->scores[i];
    if (frame_index) *frame_index = s.frame_index;
    if (anomaly) *anomaly = s.anomaly;
    if (drop) *drop = s.drop;
  });
}

rf_status rf_scores_quantile(const rf_scores* scores, double q, double* out) {
  return guarded([&] {
    need(scores, "scores");
    need(out, "out");
    require(!scores->scores.empty(), ErrorKind::Domain, "quantile of an empty score set");
    require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidArgument, "quantile must lie in [0, 1]");
    std::vector<double> v;
    for (const auto& s : scores->scores) v.push_back(s.anomaly);
    std::sort(v.begin(), v.end());
    *out = v[static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)))];
  });
}

void rf_scores_free(rf_scores* scores) { delete scores; }

rf_status rf_detect(const rf_scores* scores, double anomaly_threshold, double drop_threshold, rf_detections** out) {
  return guarded([&] {
    need(scores, "scores");
    need(out, "out");
    detect::DetectionThresholds t{anomaly_threshold, drop_threshold};
    detect::validate(t);
    auto d = std::make_unique<rf_detections>();
    for (const auto& s : scores->scores) d->events.push_back(detect::detect(s, t));
    *out = d.release();
  });
}

rf_status rf_detections_write(const rf_detections* detections, const char* path) {
  return guarded([&] {
    need(detections, "detections");
    need(path, "path");
    detect::write_events(detections->events, path);
  });
}

size_t rf_detections_size(const rf_detections* detections) { return detections ? detections->events.size() : 0; }

size_t rf_detections_falls(const rf_detections* detections) {
  if (!detections) return 0;
  return static_cast<size_t>(std::count_if(detections->events.begin(), detections->events.end(),
                                           [](const auto& e) { return e.is_fall; }));
}

void rf_detections_free(rf_detections* detections) { delete detections; }

// ---- evaluation and plots -------------------------------------------------

rf_status rf_evaluate(const rf_scores* scores, const rf_labels* labels, double drop_threshold, int64_t half_window,
                      rf_roc** out) {
  return guarded([&] {
    need(scores, "scores");
    need(labels, "labels");
    need(out, "out");
    require(drop_threshold > 0, ErrorKind::InvalidArgument, "drop threshold must be > 0");
    auto r = std::make_unique<rf_roc>();
    r->points = eval::roc_sweep(scores->scores, labels->labels, drop_threshold, half_window);
    r->labels = labels->labels.fall_frame_indices.size();
    r->half_window = half_window;
    r->drop_threshold = drop_threshold;
    *out = r.release();
  });
}

rf_status rf_roc_write_csv(const rf_roc* roc, const char* path) {
  return guarded([&] {
    need(roc, "roc");
    need(path, "path");
    eval::write_roc_csv(roc->points, path);
  });
}

rf_status rf_roc_write_svg(const rf_roc* roc, const char* title, const char* path) {
  return guarded([&] {
    need(roc, "roc");
    need(path, "path");
    io::write_text_file(path, plot::roc_svg(roc->points, title ? title : "ROC"));
  });
}

rf_status rf_roc_summary_json(const rf_roc* roc, char** out) {
  return guarded([&] {
    need(roc, "roc");
    need(out, "out");
    *out = copy_string(eval::summary_to_json(eval::summarize(roc->points, roc->labels, roc->half_window,
                                                             roc->drop_threshold)));
  });
}

rf_status rf_roc_auc(const rf_roc* roc, double* out) {
  return guarded([&] {
    need(roc, "roc");
    need(out, "out");
    *out = eval::auc(roc->points);
  });
}

void rf_roc_free(rf_roc* roc) { delete roc; }

rf_status rf_plot_trace(const rf_stream* stream, const rf_scores* scores, const rf_labels* labels, const char* title,
                        const char* path) {
  return guarded([&] {
    need(scores, "scores");
    need(path, "path");
    std::vector<std::pair<std::int64_t, double>> heights;
    if (stream)
      for (const auto& f : stream->frames) heights.emplace_back(f.frame_index, f.centroid.z());
    std::vector<std::int64_t> falls;
    if (labels) falls = labels->labels.fall_frame_indices;
    io::write_text_file(path, plot::trace_svg(heights, scores->scores, falls, title ? title : "anomaly trace"));
  });
}

}  // extern "C"

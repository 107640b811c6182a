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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "radfall/radfall.h"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("radfall_capi_" + std::to_string(std::rand()) + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
  static inline int counter = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSimulate = R"({"seed": 3, "tilt": 0.17453292519943295, "height": 2.0,
                            "recipe": {"forward_fall": 1, "sit": 1, "jump": 1}})";
const char* kPrep = R"({"length": 4, "points": 8, "stride": 2, "seed": 1})";
const char* kModel = R"({"length": 4, "points": 8, "latent": 2, "encoder_hidden": [6], "decoder_hidden": [6],
                         "rnn_hidden": 4, "epochs": 2, "batch_size": 8, "seed": 9})";

}  // namespace

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(rf_status_name(RF_OK), "ok");
  EXPECT_STRNE(rf_status_name(RF_ERR_NUMERICAL), rf_status_name(RF_ERR_PARSE));
  EXPECT_NE(std::string(rf_version()), "");
}

TEST(CApi, NullArgumentsAreRejected) {
  rf_stream* s = nullptr;
  EXPECT_EQ(rf_stream_read(nullptr, 0, 0, &s), RF_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(rf_last_error()), "");
  EXPECT_EQ(rf_stream_write(nullptr, "x"), RF_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(rf_stream_size(nullptr), 0u);
  rf_stream_free(nullptr);
}

TEST(CApi, MissingFileIsIoError) {
  rf_stream* s = nullptr;
  EXPECT_EQ(rf_stream_read("/nonexistent/stream.jsonl", 0, 0, &s), RF_ERR_IO);
  EXPECT_EQ(s, nullptr);
}

TEST(CApi, BadJsonIsParseError) {
  rf_stream* frames = nullptr;
  rf_labels* labels = nullptr;
  EXPECT_EQ(rf_simulate("{not json", &frames, &labels, nullptr), RF_ERR_PARSE);
  EXPECT_EQ(rf_simulate(R"({"tilt": 0.1})", &frames, &labels, nullptr), RF_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(rf_simulate(R"({"seed": 1, "recipe": {"forward_fall": 1}, "colour": 2})", &frames, &labels, nullptr),
            RF_ERR_FORMAT);
  EXPECT_EQ(rf_simulate(R"({"seed": 1, "recipe": {"forward_fall": 1}, "simulator": {"warp": 2}})", &frames, &labels,
                        nullptr),
            RF_ERR_FORMAT);
}

TEST(CApi, DefaultConfigsAreJsonObjects) {
  char* text = nullptr;
  ASSERT_EQ(rf_model_default_config_json(&text), RF_OK);
  EXPECT_NE(std::string(text).find("\"latent\""), std::string::npos);
  rf_string_free(text);
  ASSERT_EQ(rf_simulator_default_config_json(&text), RF_OK);
  EXPECT_NE(std::string(text).find("\"mean_points\""), std::string::npos);
  rf_string_free(text);
}

TEST(CApi, EndToEndPipeline) {
  Scratch tmp;
  rf_stream* frames = nullptr;
  rf_labels* labels = nullptr;
  char* segments = nullptr;
  ASSERT_EQ(rf_simulate(kSimulate, &frames, &labels, &segments), RF_OK) << rf_last_error();
  EXPECT_EQ(rf_labels_size(labels), 1u);
  EXPECT_NE(std::string(segments).find("forward_fall"), std::string::npos);
  rf_string_free(segments);
  ASSERT_GT(rf_stream_size(frames), 20u);
  int64_t index = -1;
  double height = 0.0;
  ASSERT_EQ(rf_stream_frame(frames, 0, &index, &height), RF_OK);
  EXPECT_EQ(index, 0);
  EXPECT_EQ(rf_stream_frame(frames, rf_stream_size(frames), &index, &height), RF_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(rf_stream_write(frames, (tmp / "s.jsonl").c_str()), RF_OK);
  rf_stream* reread = nullptr;
  ASSERT_EQ(rf_stream_read((tmp / "s.jsonl").c_str(), 0, 0, &reread), RF_OK);
  EXPECT_EQ(rf_stream_size(reread), rf_stream_size(frames));
  rf_stream_free(reread);

  rf_patterns* patterns = nullptr;
  ASSERT_EQ(rf_patterns_build(frames, kPrep, &patterns), RF_OK) << rf_last_error();
  int length = 0, points = 0;
  ASSERT_EQ(rf_patterns_shape(patterns, &length, &points), RF_OK);
  EXPECT_EQ(length, 4);
  EXPECT_EQ(points, 8);

  std::vector<double> seen;
  auto on_epoch = [](int, double loss, void* user) { static_cast<std::vector<double>*>(user)->push_back(loss); };
  rf_model* model = nullptr;
  ASSERT_EQ(rf_model_train(patterns, kModel, on_epoch, &seen, &model), RF_OK) << rf_last_error();
  EXPECT_EQ(seen.size(), 2u);
  double history[8];
  size_t n = 0;
  ASSERT_EQ(rf_model_loss_history(model, history, 8, &n), RF_OK);
  ASSERT_EQ(n, 2u);
  EXPECT_EQ(history[1], seen[1]);

  ASSERT_EQ(rf_model_save(model, (tmp / "w.json").c_str()), RF_OK);
  rf_model* loaded = nullptr;
  ASSERT_EQ(rf_model_load((tmp / "w.json").c_str(), &loaded), RF_OK);
  ASSERT_EQ(rf_model_save(loaded, (tmp / "w2.json").c_str()), RF_OK);
  EXPECT_EQ(slurp(tmp / "w.json"), slurp(tmp / "w2.json"));

  rf_scores* scores = nullptr;
  rf_scores* again = nullptr;
  ASSERT_EQ(rf_score(model, patterns, 4, &scores), RF_OK);
  ASSERT_EQ(rf_score(loaded, patterns, 4, &again), RF_OK);
  ASSERT_EQ(rf_scores_size(scores), rf_patterns_size(patterns));
  ASSERT_EQ(rf_scores_write(scores, (tmp / "a.csv").c_str()), RF_OK);
  ASSERT_EQ(rf_scores_write(again, (tmp / "b.csv").c_str()), RF_OK);
  EXPECT_EQ(slurp(tmp / "a.csv"), slurp(tmp / "b.csv"));

  double lo = 0.0, hi = 0.0;
  ASSERT_EQ(rf_scores_quantile(scores, 0.0, &lo), RF_OK);
  ASSERT_EQ(rf_scores_quantile(scores, 1.0, &hi), RF_OK);
  EXPECT_LE(lo, hi);
  EXPECT_EQ(rf_scores_quantile(scores, 1.5, &hi), RF_ERR_INVALID_ARGUMENT);

  rf_detections* none = nullptr;
  ASSERT_EQ(rf_detect(scores, hi + 1.0, 0.6, &none), RF_OK);
  EXPECT_EQ(rf_detections_falls(none), 0u);
  EXPECT_EQ(rf_detections_size(none), rf_scores_size(scores));
  rf_detections_free(none);
  EXPECT_EQ(rf_detect(scores, 0.0, -1.0, &none), RF_ERR_INVALID_ARGUMENT);

  rf_roc* roc = nullptr;
  ASSERT_EQ(rf_evaluate(scores, labels, 0.01, 5, &roc), RF_OK) << rf_last_error();
  double area = -1.0;
  ASSERT_EQ(rf_roc_auc(roc, &area), RF_OK);
  EXPECT_GE(area, 0.0);
  EXPECT_LE(area, 1.0);
  char* summary = nullptr;
  ASSERT_EQ(rf_roc_summary_json(roc, &summary), RF_OK);
  EXPECT_NE(std::string(summary).find("\"auc\""), std::string::npos);
  rf_string_free(summary);
  ASSERT_EQ(rf_roc_write_csv(roc, (tmp / "roc.csv").c_str()), RF_OK);
  ASSERT_EQ(rf_roc_write_svg(roc, "roc", (tmp / "roc.svg").c_str()), RF_OK);
  EXPECT_EQ(slurp(tmp / "roc.csv").rfind("threshold,tp,fa,rate", 0), 0u);
  ASSERT_EQ(rf_plot_trace(frames, scores, labels, "trace", (tmp / "t.svg").c_str()), RF_OK);
  EXPECT_NE(slurp(tmp / "t.svg").find("<svg"), std::string::npos);

  rf_roc_free(roc);
  rf_scores_free(scores);
  rf_scores_free(again);
  rf_model_free(model);
  rf_model_free(loaded);
  rf_patterns_free(patterns);
  rf_labels_free(labels);
  rf_stream_free(frames);
}

TEST(CApi, ModelShapeMismatchIsRejected) {
  rf_stream* frames = nullptr;
  rf_labels* labels = nullptr;
  ASSERT_EQ(rf_simulate(kSimulate, &frames, &labels, nullptr), RF_OK);
  rf_patterns* patterns = nullptr;
  ASSERT_EQ(rf_patterns_build(frames, kPrep, &patterns), RF_OK);
  rf_model* model = nullptr;
  EXPECT_NE(rf_model_train(patterns, R"({"length": 5, "points": 8, "epochs": 1})", nullptr, nullptr, &model), RF_OK);
  EXPECT_EQ(model, nullptr);
  EXPECT_EQ(rf_model_train(patterns, R"({"epochs": 1, "wobble": 1})", nullptr, nullptr, &model),
            RF_ERR_FORMAT);
  rf_patterns_free(patterns);
  rf_labels_free(labels);
  rf_stream_free(frames);
}

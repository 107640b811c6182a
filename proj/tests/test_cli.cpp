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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "support.hpp"

using radfall::testkit::TempDir;

namespace {

struct Run {
  int code = -1;
  std::string err;
};

Run cli(const TempDir& dir, const std::string& args) {
  const auto err_path = dir / "stderr.txt";
  const std::string command = std::string(RADFALL_CLI) + " " + args + " > " + (dir / "stdout.txt").string() +
                              " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::filesystem::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, MicroPipeline) {
  TempDir dir;
  write(dir / "run.json", R"({"simulate": {"recipe": {"forward_fall": 2, "sit": 1, "jump": 1}},
                              "train": {"model": {"epochs": 2, "latent": 2, "encoder_hidden": [8],
                                                  "decoder_hidden": [8], "rnn_hidden": 4}}})");
  const auto cfg = quoted(dir / "run.json");
  const auto sim = dir / "sim";
  ASSERT_EQ(cli(dir, "simulate --config " + cfg + " --seed 1 --out " + quoted(sim)).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(sim / "labels.json")).size(), 2u);
  const auto config = nlohmann::json::parse(slurp(sim / "config.json"));
  EXPECT_EQ(config.at("seed"), 1);
  EXPECT_EQ(config.at("recipe").at("forward_fall"), 2);
  EXPECT_DOUBLE_EQ(config.at("tilt_deg").get<double>(), 10.0);

  const auto prep = dir / "prep";
  ASSERT_EQ(cli(dir, "preprocess --stream " + quoted(sim / "stream.jsonl") + " --points 8 --stride 2 --out " +
                         quoted(prep))
                .code,
            0);
  ASSERT_TRUE(std::filesystem::exists(prep / "patterns.jsonl"));

  const auto train = dir / "train";
  auto r = cli(dir, "train --config " + cfg + " --patterns " + quoted(prep / "patterns.jsonl") +
                        " --seed 2 --quiet --out " + quoted(train));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err, "");
  EXPECT_EQ(slurp(train / "loss_history.csv").rfind("epoch,loss\n", 0), 0u);
  EXPECT_EQ(nlohmann::json::parse(slurp(train / "config.json")).at("model").at("epochs"), 2);

  const auto score = dir / "score";
  ASSERT_EQ(cli(dir, "score --weights " + quoted(train / "weights.json") + " --patterns " +
                         quoted(prep / "patterns.jsonl") + " --seed 3 --out " + quoted(score))
                .code,
            0);
  const auto detect = dir / "detect";
  ASSERT_EQ(cli(dir, "detect --scores " + quoted(score / "scores.csv") + " --reference-scores " +
                         quoted(score / "scores.csv") + " --out " + quoted(detect))
                .code,
            0);
  EXPECT_TRUE(std::filesystem::exists(detect / "detections.jsonl"));
  const auto ev = dir / "eval";
  ASSERT_EQ(cli(dir, "eval --scores " + quoted(score / "scores.csv") + " --labels " + quoted(sim / "labels.json") +
                         " --out " + quoted(ev))
                .code,
            0);
  const auto summary = nlohmann::json::parse(slurp(ev / "summary.json"));
  EXPECT_EQ(summary.at("labels"), 2);
  EXPECT_EQ(summary.at("half_window"), 5);
  EXPECT_TRUE(std::filesystem::exists(ev / "roc.svg"));
  EXPECT_TRUE(std::filesystem::exists(ev / "config.json"));
  const auto plot = dir / "plot";
  ASSERT_EQ(cli(dir, "plot --scores " + quoted(score / "scores.csv") + " --stream " + quoted(sim / "stream.jsonl") +
                         " --out " + quoted(plot))
                .code,
            0);
  EXPECT_TRUE(std::filesystem::exists(plot / "trace.svg"));
}

TEST(Cli, SameSeedSameBytes) {
  TempDir dir;
  write(dir / "run.json", R"({"recipe": {"left_fall": 1, "crouch": 1}})");
  ASSERT_EQ(cli(dir, "simulate --config " + quoted(dir / "run.json") + " --seed 4 --out " + quoted(dir / "s")).code, 0);
  ASSERT_EQ(cli(dir, "preprocess --stream " + quoted(dir / "s" / "stream.jsonl") + " --points 6 --length 5 --out " +
                         quoted(dir / "p"))
                .code,
            0);
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(cli(dir, "train --patterns " + quoted(dir / "p" / "patterns.jsonl") +
                           " --seed 5 --epochs 2 --latent 2 --quiet --out " + quoted(dir / name))
                  .code,
              0);
  }
  EXPECT_EQ(slurp(dir / "a" / "weights.json"), slurp(dir / "b" / "weights.json"));
  EXPECT_EQ(slurp(dir / "a" / "loss_history.csv"), slurp(dir / "b" / "loss_history.csv"));
}

TEST(Cli, FlagsOverrideConfigFile) {
  TempDir dir;
  write(dir / "run.json", R"({"seed": 1, "preset": "single", "tilt_deg": 20.0})");
  ASSERT_EQ(cli(dir, "simulate --config " + quoted(dir / "run.json") + " --tilt-deg 15 --seed 9 --out " +
                         quoted(dir / "s"))
                .code,
            0);
  const auto config = nlohmann::json::parse(slurp(dir / "s" / "config.json"));
  EXPECT_DOUBLE_EQ(config.at("tilt_deg").get<double>(), 15.0);
  EXPECT_EQ(config.at("seed"), 9);
}

TEST(Cli, UsageErrorsExitOne) {
  TempDir dir;
  auto r = cli(dir, "");
  EXPECT_EQ(r.code, 1);
  r = cli(dir, "simulate --out " + quoted(dir / "s"));
  EXPECT_EQ(r.code, 1);
  const auto line = nlohmann::json::parse(r.err);
  EXPECT_EQ(line.at("exit"), 1);
  EXPECT_NE(line.at("message").get<std::string>().find("seed"), std::string::npos);
  EXPECT_EQ(cli(dir, "train --bogus 1").code, 1);
  write(dir / "bad.json", R"({"sed": 3})");
  EXPECT_EQ(cli(dir, "simulate --config " + quoted(dir / "bad.json") + " --seed 1 --out " + quoted(dir / "t")).code, 1);
}

TEST(Cli, DataErrorsExitTwo) {
  TempDir dir;
  auto r = cli(dir, "preprocess --stream " + quoted(dir / "missing.jsonl") + " --out " + quoted(dir / "p"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "io");
  write(dir / "broken.jsonl", "{\"frame\": 0, \n");
  EXPECT_EQ(cli(dir, "preprocess --stream " + quoted(dir / "broken.jsonl") + " --out " + quoted(dir / "p")).code, 2);
  write(dir / "notjson.json", "{");
  EXPECT_EQ(cli(dir, "simulate --config " + quoted(dir / "notjson.json") + " --seed 1 --out " + quoted(dir / "q")).code,
            2);
}

TEST(Cli, HelpSucceeds) {
  TempDir dir;
  EXPECT_EQ(cli(dir, "--help").code, 0);
  EXPECT_EQ(cli(dir, "train --help").code, 0);
}

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "core/dataio.hpp"
#include "core/detector.hpp"

namespace radfall::eval {

struct MatchReport {
  std::vector<std::int64_t> matched;       // truth frames with a detection
  std::vector<std::int64_t> missed;        // truth frames without one
  std::vector<std::int64_t> false_alarms;  // first detection of each spurious cluster

  std::size_t true_positives() const { return matched.size(); }
};

/// Detections within `half_window` frames of each other are chained into
/// clusters. A cluster that reaches into any truth window is never a false
/// alarm; every other cluster counts once.
///
/// Each truth frame is matched greedily, earliest detection first, by at
/// most one detection inside [truth - half_window, truth + half_window].
MatchReport match_detections(const std::vector<std::int64_t>& detections, const io::GroundTruthLabel& truth,
                             std::int64_t half_window);

/// Same rule with clusters taken from `cluster_basis`, a superset of the
/// detections. With a fixed basis, shrinking the detection set can only
/// remove false alarms.
MatchReport match_detections(const std::vector<std::int64_t>& detections, const io::GroundTruthLabel& truth,
                             std::int64_t half_window, const std::vector<std::int64_t>& cluster_basis);

/// round(0.5 s * fps).
std::int64_t half_window_for(double fps);

struct RocPoint {
  double anomaly_threshold = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_alarms = 0;
  double detection_rate = 0.0;
};

/// Detection counts for every anomaly threshold, sorted by threshold
/// descending. An empty threshold list sweeps every distinct score of the
/// drop-qualified windows plus one point below all of them. Clusters are
/// formed from the windows whose drop exceeds the drop threshold.
std::vector<RocPoint> roc_sweep(const std::vector<detect::WindowScore>& scores, const io::GroundTruthLabel& truth,
                                double drop_threshold, std::int64_t half_window,
                                std::vector<double> thresholds = {});

/// Trapezoidal area under detection rate versus false alarms normalized by
/// their maximum over the sweep. A sweep without false alarms scores its
/// best detection rate.
double auc(const std::vector<RocPoint>& points);

/// Best detection rate among points with at most `budget` false alarms.
double detection_rate_at(const std::vector<RocPoint>& points, std::size_t budget);

/// CSV with header "threshold,tp,fa,rate".
void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path);

struct Summary {
  std::size_t labels = 0;
  double auc = 0.0;
  std::size_t max_false_alarms = 0;
  std::int64_t half_window = 0;
  double drop_threshold = 0.0;
  std::map<std::size_t, double> detection_rate_at_budget;
};

Summary summarize(const std::vector<RocPoint>& points, std::size_t labels, std::int64_t half_window,
                  double drop_threshold, const std::vector<std::size_t>& budgets = {0, 1, 2, 5, 10});
std::string summary_to_json(const Summary& summary);

}  // namespace radfall::eval

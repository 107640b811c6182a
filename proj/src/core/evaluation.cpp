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

#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

namespace radfall::eval {

namespace {

// Cluster id of every basis frame; consecutive frames at most half_window
// apart share an id.
std::map<std::int64_t, std::size_t> chain(std::vector<std::int64_t> basis, std::int64_t half_window) {
  std::sort(basis.begin(), basis.end());
  std::map<std::int64_t, std::size_t> id;
  std::size_t current = 0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (i > 0 && basis[i] - basis[i - 1] > half_window) ++current;
    id[basis[i]] = current;
  }
  return id;
}

bool in_any_window(std::int64_t frame, const std::vector<std::int64_t>& truth, std::int64_t half_window) {
  auto it = std::lower_bound(truth.begin(), truth.end(), frame - half_window);
  return it != truth.end() && *it <= frame + half_window;
}

}  // namespace

MatchReport match_detections(const std::vector<std::int64_t>& detections, const io::GroundTruthLabel& truth,
                             std::int64_t half_window) {
  return match_detections(detections, truth, half_window, detections);
}

MatchReport match_detections(const std::vector<std::int64_t>& detections, const io::GroundTruthLabel& truth,
                             std::int64_t half_window, const std::vector<std::int64_t>& cluster_basis) {
  io::validate(truth);
  require(half_window >= 0, ErrorKind::InvalidArgument, "half_window must be >= 0");
  require(std::is_sorted(detections.begin(), detections.end()), ErrorKind::InvalidArgument,
          "detections must be sorted");
  const auto& t = truth.fall_frame_indices;

  std::vector<bool> used(t.size(), false);
  for (std::int64_t d : detections) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!used[i] && std::llabs(d - t[i]) <= half_window) {
        used[i] = true;
        break;
      }
    }
  }
  MatchReport report;
  for (std::size_t i = 0; i < t.size(); ++i) (used[i] ? report.matched : report.missed).push_back(t[i]);

  const auto cluster = chain(cluster_basis, half_window);
  std::set<std::size_t> touching_truth;
  for (std::int64_t b : cluster_basis)
    if (in_any_window(b, t, half_window)) touching_truth.insert(cluster.at(b));
  std::set<std::size_t> counted;
  for (std::int64_t d : detections) {
    auto it = cluster.find(d);
    require(it != cluster.end(), ErrorKind::InvalidArgument, "detection missing from the cluster basis");
    if (touching_truth.count(it->second) || counted.count(it->second)) continue;
    counted.insert(it->second);
    report.false_alarms.push_back(d);
  }
  return report;
}

std::int64_t half_window_for(double fps) {
  require(fps > 0, ErrorKind::InvalidArgument, "fps must be > 0");
  return static_cast<std::int64_t>(std::llround(0.5 * fps));
}

std::vector<RocPoint> roc_sweep(const std::vector<detect::WindowScore>& scores, const io::GroundTruthLabel& truth,
                                double drop_threshold, std::int64_t half_window, std::vector<double> thresholds) {
  require(!truth.fall_frame_indices.empty(), ErrorKind::Domain, "ROC needs at least one ground-truth fall");
  std::vector<detect::WindowScore> candidates;
  for (const auto& s : scores)
    if (s.drop > drop_threshold) candidates.push_back(s);
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });
  std::vector<std::int64_t> basis;
  for (const auto& s : candidates) basis.push_back(s.frame_index);

  if (thresholds.empty()) {
    std::set<double> unique;
    for (const auto& s : candidates) unique.insert(s.anomaly);
    thresholds.assign(unique.begin(), unique.end());
    const double lowest = unique.empty() ? 0.0 : *unique.begin();
    thresholds.insert(thresholds.begin(), lowest - std::max(1.0, std::abs(lowest)));
  }
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());

  std::vector<RocPoint> points;
  const double total = static_cast<double>(truth.fall_frame_indices.size());
  for (double tau : thresholds) {
    std::vector<std::int64_t> fired;
    for (const auto& s : candidates)
      if (s.anomaly > tau) fired.push_back(s.frame_index);
    MatchReport m = match_detections(fired, truth, half_window, basis);
    points.push_back({tau, m.true_positives(), m.false_alarms.size(), static_cast<double>(m.true_positives()) / total});
  }
  return points;
}

double auc(const std::vector<RocPoint>& points) {
  require(points.size() >= 2, ErrorKind::Domain, "AUC needs at least two ROC points");
  std::vector<RocPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.anomaly_threshold > b.anomaly_threshold; });
  std::size_t max_fa = 0;
  double max_rate = 0.0;
  for (const auto& p : sorted) {
    max_fa = std::max(max_fa, p.false_alarms);
    max_rate = std::max(max_rate, p.detection_rate);
  }
  if (max_fa == 0) return max_rate;
  double area = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double x0 = static_cast<double>(sorted[i - 1].false_alarms) / static_cast<double>(max_fa);
    const double x1 = static_cast<double>(sorted[i].false_alarms) / static_cast<double>(max_fa);
    area += (x1 - x0) * 0.5 * (sorted[i - 1].detection_rate + sorted[i].detection_rate);
  }
  return area;
}

double detection_rate_at(const std::vector<RocPoint>& points, std::size_t budget) {
  double best = 0.0;
  for (const auto& p : points)
    if (p.false_alarms <= budget) best = std::max(best, p.detection_rate);
  return best;
}

void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path) {
  std::string out = "threshold,tp,fa,rate\n";
  for (const auto& p : points)
    out += io::format_double(p.anomaly_threshold) + "," + std::to_string(p.true_positives) + "," +
           std::to_string(p.false_alarms) + "," + io::format_double(p.detection_rate) + "\n";
  io::write_text_file(path, out);
}

Summary summarize(const std::vector<RocPoint>& points, std::size_t labels, std::int64_t half_window,
                  double drop_threshold, const std::vector<std::size_t>& budgets) {
  Summary s;
  s.labels = labels;
  s.auc = auc(points);
  for (const auto& p : points) s.max_false_alarms = std::max(s.max_false_alarms, p.false_alarms);
  s.half_window = half_window;
  s.drop_threshold = drop_threshold;
  for (std::size_t b : budgets) s.detection_rate_at_budget[b] = detection_rate_at(points, b);
  return s;
}

std::string summary_to_json(const Summary& s) {
  nlohmann::json budgets = nlohmann::json::object();
  for (const auto& [b, rate] : s.detection_rate_at_budget) budgets[std::to_string(b)] = rate;
  nlohmann::json j{{"labels", s.labels},
                   {"auc", s.auc},
                   {"max_false_alarms", s.max_false_alarms},
                   {"half_window", s.half_window},
                   {"drop_threshold", s.drop_threshold},
                   {"detection_rate_at_false_alarms", budgets},
                   {"false_alarm_rule",
                    "candidate windows above the drop threshold are chained when at most half_window frames "
                    "apart; a chain reaching into a ground-truth window is not a false alarm, any other chain "
                    "with a detection counts once"}};
  return j.dump(2) + "\n";
}

}  // namespace radfall::eval

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

#include "core/scoring.hpp"

namespace radfall::model {

std::vector<detect::WindowScore> score_patterns(const std::vector<prep::MotionPattern>& patterns, HvraeModel& model,
                                                std::uint64_t seed) {
  std::vector<detect::WindowScore> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns)
    out.push_back({p.end_frame_index(), anomaly_score(p, model, seed), detect::centroid_drop(p.centroid_heights)});
  return out;
}

}  // namespace radfall::model

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
#include <vector>

#include "core/detector.hpp"
#include "core/hvrae.hpp"

namespace radfall::model {

/// Anomaly level and centroid drop of every pattern, stamped with the
/// pattern's last frame.
std::vector<detect::WindowScore> score_patterns(const std::vector<prep::MotionPattern>& patterns, HvraeModel& model,
                                                std::uint64_t seed);

}  // namespace radfall::model

// Copyright 2026 The hdeploy Authors.
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

//
// Brute-force reference for the clone detector. Plain O(n*m) dynamic
// programming over token classes, compared token by token; shares no
// matching code with the production suffix-automaton path.
//
#pragma once

#include <vector>

#include "hdeploy/clone_detector.hpp"

namespace hdeploy::testing {

CommonRun oracle_longest_common_run(const NormalizedSequence& a, const NormalizedSequence& b);

std::vector<CloneMatch> oracle_detect(const NormalizedSequence& user_seq, const PatternDB& db,
                                      const DetectorConfig& cfg);

}  // namespace hdeploy::testing

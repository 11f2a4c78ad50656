// Copyright 2026 The echo-lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace echolab {

// Threshold single-photon detector. Dead time is non-paralyzable.
struct DetectorModel {
    double efficiency = 1.0;
    double dark_rate_hz = 0.0;
    double jitter_sigma_s = 0.0;
    double dead_time_s = 0.0;
};

void validate(const DetectorModel& det);

} // namespace echolab

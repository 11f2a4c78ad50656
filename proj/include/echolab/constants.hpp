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

#include <cstdint>
#include <numbers>

namespace echolab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;

// CODATA exact values (SI 2019).
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K

// Time tags are integer picoseconds.
using Picoseconds = std::int64_t;

inline constexpr double kSecondsPerPs = 1e-12;

constexpr Picoseconds to_ps(double seconds)
{
    return static_cast<Picoseconds>(seconds * 1e12 + (seconds >= 0 ? 0.5 : -0.5));
}

constexpr double to_seconds(Picoseconds ps) { return static_cast<double>(ps) * kSecondsPerPs; }

} // namespace echolab

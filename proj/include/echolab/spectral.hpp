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

enum class LineShape { Lorentzian, Gaussian };

// An optical line described as a detuning from a user-chosen reference
// frequency. `center_hz` is therefore allowed to be zero or negative.
struct SpectralLine {
    double center_hz = 0.0;
    double fwhm_hz = 0.0;
    LineShape shape = LineShape::Lorentzian;
};

void validate(const SpectralLine& line);

// Peak-normalised line profile: 1 at the center, 1/2 at center +- fwhm/2.
double line_weight(const SpectralLine& line, double nu_hz);

// Cavity photon lifetime T = 1 / (2 pi linewidth) and its inverse.
enum class ConversionDirection { LinewidthToLifetime, LifetimeToLinewidth };

double lifetime_linewidth_convert(double value, ConversionDirection direction);

inline double lifetime_from_linewidth(double linewidth_hz)
{
    return lifetime_linewidth_convert(linewidth_hz, ConversionDirection::LinewidthToLifetime);
}

inline double linewidth_from_lifetime(double lifetime_s)
{
    return lifetime_linewidth_convert(lifetime_s, ConversionDirection::LifetimeToLinewidth);
}

} // namespace echolab

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

#include "echolab/spectral.hpp"

#include <cmath>
#include <string>

#include "echolab/constants.hpp"
#include "echolab/error.hpp"

namespace echolab {

void validate(const SpectralLine& line)
{
    if (!(line.fwhm_hz > 0.0) || !std::isfinite(line.fwhm_hz)) {
        throw InvalidParameter("spectral line fwhm must be positive, got " +
                               std::to_string(line.fwhm_hz));
    }
    if (!std::isfinite(line.center_hz)) {
        throw InvalidParameter("spectral line center must be finite");
    }
}

double line_weight(const SpectralLine& line, double nu_hz)
{
    validate(line);
    const double x = 2.0 * (nu_hz - line.center_hz) / line.fwhm_hz;
    switch (line.shape) {
    case LineShape::Lorentzian:
        return 1.0 / (1.0 + x * x);
    case LineShape::Gaussian:
        return std::exp(-kLn2 * x * x);
    }
    return 0.0;
}

double lifetime_linewidth_convert(double value, ConversionDirection)
{
    // T = 1/(2 pi dnu) is its own inverse in form.
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter("lifetime/linewidth must be positive, got " +
                               std::to_string(value));
    }
    return 1.0 / (2.0 * kPi * value);
}

} // namespace echolab

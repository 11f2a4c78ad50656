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

#include <stdexcept>
#include <string>

namespace echolab {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Frequency grid too coarse or too narrow for the requested echo simulation.
class ResolutionError : public Error {
public:
    ResolutionError(const std::string& what, std::size_t required_samples)
        : Error(what), required_samples_(required_samples)
    {
    }

    std::size_t required_samples() const noexcept { return required_samples_; }

private:
    std::size_t required_samples_;
};

class DivisionDomainError : public Error {
public:
    using Error::Error;
};

class UndefinedVisibility : public Error {
public:
    using Error::Error;
};

class UndefinedCorrelation : public Error {
public:
    using Error::Error;
};

class InputOrderError : public Error {
public:
    using Error::Error;
};

class FitDegenerate : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace echolab

/* Copyright 2026 The PulsePINN Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef PULSEPINN_ERRORS_HPP
#define PULSEPINN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pulsepinn {

struct NonFiniteValue : std::runtime_error {
  explicit NonFiniteValue(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : std::runtime_error {
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NotHermitian : std::runtime_error {
  explicit NotHermitian(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidDensityMatrix : std::runtime_error {
  explicit InvalidDensityMatrix(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeRate : std::runtime_error {
  explicit NegativeRate(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownGate : std::runtime_error {
  explicit UnknownGate(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateState : std::runtime_error {
  explicit DegenerateState(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteGradient : std::runtime_error {
  explicit NonFiniteGradient(const std::string& what) : std::runtime_error(what) {}
};

struct NonPhysicalFidelity : std::runtime_error {
  explicit NonPhysicalFidelity(const std::string& what) : std::runtime_error(what) {}
};

struct MissingArtifact : std::runtime_error {
  explicit MissingArtifact(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewSamples : std::runtime_error {
  explicit TooFewSamples(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pulsepinn

#endif  // PULSEPINN_ERRORS_HPP

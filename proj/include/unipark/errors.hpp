// Copyright 2026 The unipark Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace unipark {

/// Non-finite or otherwise inadmissible scalar input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// State on (or beyond) the boundary of a barrier axis, |angle| >= pi.
class BarrierDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Coordinate change evaluated where it is not defined (e.g. rho = 0).
class UndefinedTransformError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Open-loop polar field evaluated at the rho = 0 singularity.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Violated precondition of a helper (gains, bound-check arguments, composite forms).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pole specification that no admissible gain vector realizes.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario, grid or command-line configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace unipark

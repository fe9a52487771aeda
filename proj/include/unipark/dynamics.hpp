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

// Vector fields of the unicycle in both charts.

#pragma once

#include <cmath>

#include "unipark/control.hpp"
#include "unipark/errors.hpp"
#include "unipark/state_space.hpp"

namespace unipark {

/// Time derivative of a PolarState (rho', delta', gamma').
struct PolarRate {
  double rho = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};

struct CartesianRate {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Unicycle kinematics x' = v cos(theta), y' = v sin(theta), theta' = omega.
inline CartesianRate unicycle_field(const CartesianState& c, const ControlInput& u) {
  return {u.v * std::cos(c.theta), u.v * std::sin(c.theta), u.omega};
}

/// Polar kinematics for arbitrary inputs:
/// rho' = -v cos(gamma), delta' = v sin(gamma)/rho, gamma' = delta' - omega.
inline PolarRate open_loop_polar_field(const PolarState& p, const ControlInput& u,
                                       double rho_guard = 1e-9) {
  if (!(p.rho > rho_guard)) {
    throw SingularityError("open_loop_polar_field: rho at or below the singular guard");
  }
  const double d = u.v * std::sin(p.gamma) / p.rho;
  return {-u.v * std::cos(p.gamma), d, d - u.omega};
}

/// Closed loop with v = k1 rho cos(gamma). The v/rho quotient is simplified
/// away, so the (delta, gamma) part does not depend on rho and rho = 0 is regular.
inline PolarRate closed_loop_field(ControllerId id, const Gains& g, const PolarState& p) {
  const double c = std::cos(p.gamma);
  const double half_s2 = 0.5 * g.k1 * std::sin(2.0 * p.gamma);
  const double omega = steering_total(id, g, p.delta, p.gamma);
  return {-g.k1 * p.rho * c * c, half_s2, half_s2 - omega};
}

inline PolarRate closed_loop_field(const Controller& ctl, const PolarState& p) {
  return closed_loop_field(ctl.id(), ctl.gains(), p);
}

}  // namespace unipark

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

// Coordinate frames and the four polar state spaces.
//
// Polar coordinates relative to a target pose (x*, y*, th*):
//   rho   = |(x - x*, y - y*)|
//   delta = atan2(y - y*, x - x*) - th* + pi      (polar angle)
//   gamma = delta - th + th*                       (line-of-sight angle)
// delta = 0 is directly behind the target, gamma = 0 is facing it. Angles
// are kept unwrapped; wrap_angles() is the explicit move to [-pi, pi).

#pragma once

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "unipark/errors.hpp"
#include "unipark/kernels.hpp"

namespace unipark {

struct CartesianState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  ///< unwrapped heading
};

struct PolarState {
  double rho = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};

/// Nonholonomic-integrator coordinates xi = -rho cos(gamma), eta = rho sin(gamma).
struct IntegratorState {
  double xi = 0.0;
  double eta = 0.0;
  double theta = 0.0;
};

/// S: delta, gamma free. S1: |gamma| < pi. S2: |delta| < pi. S3: both.
enum class StateSpaceId { S, S1, S2, S3 };

constexpr bool delta_bounded(StateSpaceId ss) {
  return ss == StateSpaceId::S2 || ss == StateSpaceId::S3;
}
constexpr bool gamma_bounded(StateSpaceId ss) {
  return ss == StateSpaceId::S1 || ss == StateSpaceId::S3;
}

inline std::string_view to_string(StateSpaceId ss) {
  switch (ss) {
    case StateSpaceId::S: return "S";
    case StateSpaceId::S1: return "S1";
    case StateSpaceId::S2: return "S2";
    case StateSpaceId::S3: return "S3";
  }
  return "?";
}

inline StateSpaceId state_space_from_string(std::string_view s) {
  if (s == "S") return StateSpaceId::S;
  if (s == "S1") return StateSpaceId::S1;
  if (s == "S2") return StateSpaceId::S2;
  if (s == "S3") return StateSpaceId::S3;
  throw ConfigError("unknown state space '" + std::string(s) + "'");
}

/// Polar coordinates of `c` relative to `target`.
inline PolarState cartesian_to_polar(const CartesianState& c,
                                     const CartesianState& target = {}) {
  const double dx = c.x - target.x;
  const double dy = c.y - target.y;
  const double rho = std::hypot(dx, dy);
  if (!(rho > 0.0)) {
    throw UndefinedTransformError("cartesian_to_polar: zero distance to target");
  }
  const double delta = std::atan2(dy, dx) - target.theta + kPi;
  return {rho, delta, delta - c.theta + target.theta};
}

/// Angles for reverse parking: delta_hat = atan2(y, x), gamma_hat = delta_hat - theta.
/// (Target-relative, same generalization as cartesian_to_polar.)
inline PolarState cartesian_to_polar_reverse(const CartesianState& c,
                                             const CartesianState& target = {}) {
  PolarState p = cartesian_to_polar(c, target);
  p.delta -= kPi;
  p.gamma -= kPi;
  return p;
}

/// Inverse of cartesian_to_polar. Continuous everywhere, including rho = 0.
inline CartesianState polar_to_cartesian(const PolarState& p,
                                         const CartesianState& target = {}) {
  const double a = p.delta + target.theta;
  return {target.x - p.rho * std::cos(a), target.y - p.rho * std::sin(a),
          p.delta - p.gamma + target.theta};
}

inline PolarState wrap_angles(const PolarState& p) {
  return {p.rho, wrap_angle(p.delta), wrap_angle(p.gamma)};
}

inline IntegratorState to_integrator(const PolarState& p) {
  return {-p.rho * std::cos(p.gamma), p.rho * std::sin(p.gamma), p.delta - p.gamma};
}

/// Inverse of to_integrator on xi < 0, where gamma = -arctan(eta/xi) is in (-pi/2, pi/2).
inline PolarState from_integrator(const IntegratorState& s) {
  if (!(s.xi < 0.0)) {
    throw UndefinedTransformError("from_integrator: requires xi < 0");
  }
  const double gamma = -std::atan(s.eta / s.xi);
  return {std::hypot(s.xi, s.eta), s.theta + gamma, gamma};
}

/// Delta/Gamma axis maps: identity on a free axis, 2 tan(a/2) on a barrier axis.
struct AxisValue {
  double value;       ///< Delta(a) or Gamma(a)
  double derivative;  ///< d/da
};

inline void check_barrier_axis(double a, const char* axis) {
  if (!std::isfinite(a)) {
    throw DomainError(std::string(axis) + " is not finite");
  }
  if (std::abs(a) >= kPi - kBarrierEpsilon) {
    throw BarrierDomainError(std::string("|") + axis + "| >= pi on a barrier axis");
  }
}

inline AxisValue axis_map(double a, bool barrier, const char* axis = "angle") {
  if (!barrier) {
    if (!std::isfinite(a)) throw DomainError(std::string(axis) + " is not finite");
    return {a, 1.0};
  }
  check_barrier_axis(a, axis);
  const double t = std::tan(0.5 * a);
  return {2.0 * t, 1.0 + t * t};
}

inline AxisValue big_delta(double delta, StateSpaceId ss) {
  return axis_map(delta, delta_bounded(ss), "delta");
}
inline AxisValue big_gamma(double gamma, StateSpaceId ss) {
  return axis_map(gamma, gamma_bounded(ss), "gamma");
}

/// Throws BarrierDomainError unless (delta, gamma) is interior to ss.
inline void require_inside(StateSpaceId ss, double delta, double gamma) {
  if (delta_bounded(ss)) check_barrier_axis(delta, "delta");
  if (gamma_bounded(ss)) check_barrier_axis(gamma, "gamma");
}

inline bool is_inside(StateSpaceId ss, double delta, double gamma) {
  if (!std::isfinite(delta) || !std::isfinite(gamma)) return false;
  if (delta_bounded(ss) && std::abs(delta) >= kPi - kBarrierEpsilon) return false;
  if (gamma_bounded(ss) && std::abs(gamma) >= kPi - kBarrierEpsilon) return false;
  return true;
}

/// rho + |Delta| + |Gamma|.
inline double metric(const PolarState& p, StateSpaceId ss) {
  return p.rho + std::abs(big_delta(p.delta, ss).value) +
         std::abs(big_gamma(p.gamma, ss).value);
}

/// Distance of the barrier axes of ss to +-pi; nullopt when ss has none.
inline std::optional<double> barrier_margin(const PolarState& p, StateSpaceId ss) {
  std::optional<double> m;
  if (delta_bounded(ss)) m = kPi - std::abs(p.delta);
  if (gamma_bounded(ss)) {
    const double g = kPi - std::abs(p.gamma);
    m = m ? std::min(*m, g) : g;
  }
  return m;
}

/// (tan(delta/2), tan(gamma/2)) straight from (x, y, theta), target at the origin.
inline std::pair<double, double> barrier_terms_cartesian(const CartesianState& c) {
  const double r = std::hypot(c.x, c.y);
  if (!(r > 0.0)) {
    throw UndefinedTransformError("barrier_terms_cartesian: x = y = 0");
  }
  constexpr double kEps = 4.0 * std::numeric_limits<double>::epsilon();
  const double den_delta = r - c.x;
  if (den_delta <= kEps * r) {
    throw BarrierDomainError("barrier_terms_cartesian: |delta| = pi (x > 0, y = 0)");
  }
  const double ct = std::cos(c.theta);
  const double st = std::sin(c.theta);
  const double den_gamma = r - c.x * ct - c.y * st;
  if (den_gamma <= kEps * r) {
    throw BarrierDomainError("barrier_terms_cartesian: |gamma| = pi");
  }
  return {-c.y / den_delta, (c.x * st - c.y * ct) / den_gamma};
}

}  // namespace unipark

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

// Initial-state sets for sweeps.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "unipark/errors.hpp"
#include "unipark/simulate.hpp"
#include "unipark/state_space.hpp"

namespace unipark {

/// Poses on a circle of radius r around the origin, all with heading 0.
inline std::vector<InitialState> ring_grid(std::size_t n = 8, double r = 2.0) {
  std::vector<InitialState> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    out.push_back({CartesianState{r * std::cos(a), r * std::sin(a), 0.0}, {}});
  }
  return out;
}

/// Poses ahead of and beside the target, headings across the half-turn.
/// Several of these are pulled across the positive x-axis by the laws on S.
inline std::vector<InitialState> front_grid() {
  std::vector<InitialState> out;
  for (double x : {1.0, 2.0, 3.0}) {
    for (double y : {-1.0, -0.25, 0.25, 1.0}) {
      for (double th : {-kPi / 2, 0.0, kPi / 2}) {
        out.push_back({CartesianState{x, y, th}, {}});
      }
    }
  }
  return out;
}

/// n x n x n poses over [-half, half]^2 x [-pi, pi], skipping the target position.
inline std::vector<InitialState> cartesian_box_grid(std::size_t n = 5, double half = 2.0) {
  std::vector<InitialState> out;
  auto lin = [n](double lo, double hi, std::size_t i) {
    return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double x = lin(-half, half, i), y = lin(-half, half, j);
        if (x == 0.0 && y == 0.0) continue;
        out.push_back({CartesianState{x, y, lin(-kPi, kPi, k)}, {}});
      }
    }
  }
  return out;
}

/// Seeded polar states with 0 < rho + |Delta| + |Gamma| <= max_metric inside ss.
inline std::vector<InitialState> random_metric_grid(StateSpaceId ss, std::size_t n,
                                                    std::uint64_t seed, double max_metric = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-max_metric, max_metric);
  std::vector<InitialState> out;
  while (out.size() < n) {
    const double rho = std::abs(u(rng));
    const double d = u(rng);
    const double c = u(rng);
    const double m = rho + std::abs(d) + std::abs(c);
    if (!(m <= max_metric) || m == 0.0) continue;
    const double delta = delta_bounded(ss) ? 2.0 * std::atan(0.5 * d) : d;
    const double gamma = gamma_bounded(ss) ? 2.0 * std::atan(0.5 * c) : c;
    out.push_back({{}, PolarState{rho, delta, gamma}});
  }
  return out;
}

inline std::vector<InitialState> preset_grid(std::string_view name) {
  if (name == "ring") return ring_grid();
  if (name == "front") return front_grid();
  if (name == "box") return cartesian_box_grid();
  throw ConfigError("unknown grid preset '" + std::string(name) + "'");
}

}  // namespace unipark

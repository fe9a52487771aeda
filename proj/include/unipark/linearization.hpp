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

// Linearization of the closed loops at the target and eigenvalue assignment.
//
// In (rho, delta, gamma) order every Jacobian has the form
//   [[-k1, 0, 0], [0, 0, k1], [0, -a, -b]],
// so -k1 decouples and the rest is a 2x2 companion block with
// characteristic polynomial l^2 + b l + k1 a.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unipark/control.hpp"
#include "unipark/dynamics.hpp"
#include "unipark/errors.hpp"

namespace unipark {

using Matrix3 = std::array<std::array<double, 3>, 3>;
using Complex = std::complex<double>;

inline std::string_view to_string(DesignFamily f) {
  switch (f) {
    case DesignFamily::Passivity: return "passivity";
    case DesignFamily::Forwarding: return "forwarding";
    case DesignFamily::Backstepping: return "backstepping";
  }
  return "?";
}

inline DesignFamily design_family_from_string(std::string_view s) {
  if (s == "passivity") return DesignFamily::Passivity;
  if (s == "forwarding") return DesignFamily::Forwarding;
  if (s == "backstepping") return DesignFamily::Backstepping;
  throw ConfigError("unknown design family '" + std::string(s) + "'");
}

inline Matrix3 jacobian(DesignFamily family, const Gains& g) {
  double a = g.k3;
  double b = g.k2;
  if (family == DesignFamily::Forwarding) {
    b = g.k2 + g.k1 * g.k3 / g.k2;
  } else if (family == DesignFamily::Backstepping) {
    a = g.k3 + g.k2 * g.k4;
    b = g.k1 * g.k2 + g.k4;
  }
  return {{{-g.k1, 0.0, 0.0}, {0.0, 0.0, g.k1}, {0.0, -a, -b}}};
}

/// Central-difference Jacobian of the nonlinear closed loop at `at`.
inline Matrix3 fd_jacobian(ControllerId id, const Gains& g, const PolarState& at,
                           double h = 1e-6) {
  Matrix3 j{};
  for (int col = 0; col < 3; ++col) {
    PolarState plus = at;
    PolarState minus = at;
    double* pp = col == 0 ? &plus.rho : col == 1 ? &plus.delta : &plus.gamma;
    double* pm = col == 0 ? &minus.rho : col == 1 ? &minus.delta : &minus.gamma;
    *pp += h;
    *pm -= h;
    const PolarRate fp = closed_loop_field(id, g, plus);
    const PolarRate fm = closed_loop_field(id, g, minus);
    j[0][col] = (fp.rho - fm.rho) / (2.0 * h);
    j[1][col] = (fp.delta - fm.delta) / (2.0 * h);
    j[2][col] = (fp.gamma - fm.gamma) / (2.0 * h);
  }
  return j;
}

/// Eigenvalues of a matrix with the closed-loop block structure, ordered
/// {J00, block root with larger real part, other block root}.
inline std::array<Complex, 3> closed_loop_eigenvalues(const Matrix3& j) {
  if (j[0][1] != 0.0 || j[0][2] != 0.0 || j[1][0] != 0.0 || j[2][0] != 0.0) {
    throw ContractViolation("closed_loop_eigenvalues: rho row/column not decoupled");
  }
  const double tr = j[1][1] + j[2][2];
  const double det = j[1][1] * j[2][2] - j[1][2] * j[2][1];
  const double disc = 0.25 * tr * tr - det;
  const double half = 0.5 * tr;
  if (disc >= 0.0) {
    // Avoid cancellation in the smaller root.
    const double s = std::sqrt(disc);
    const double big = half < 0.0 ? half - s : half + s;
    const double small = big != 0.0 ? det / big : 0.0;
    const double r1 = std::max(big, small);
    const double r2 = std::min(big, small);
    return {Complex(j[0][0], 0.0), Complex(r1, 0.0), Complex(r2, 0.0)};
  }
  const double im = std::sqrt(-disc);
  return {Complex(j[0][0], 0.0), Complex(half, im), Complex(half, -im)};
}

/// Requested closed-loop poles -p1, -p2, -p3. p1 is real; p2, p3 are both
/// real or a conjugate pair stored with Im(p2) >= 0.
struct PoleSpec {
  double p1 = 1.0;
  Complex p2{1.0, 0.0};
  Complex p3{1.0, 0.0};

  bool complex_pair() const { return p2.imag() != 0.0 || p3.imag() != 0.0; }

  void validate() const {
    if (!std::isfinite(p1) || !(p1 > 0.0)) {
      throw ContractViolation("poles: p1 must be real with -p1 < 0");
    }
    for (const Complex& p : {p2, p3}) {
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag()) || !(p.real() > 0.0)) {
        throw ContractViolation("poles: every pole needs a negative real part");
      }
    }
    if (complex_pair() && (p2 != std::conj(p3) || p2.imag() < 0.0)) {
      throw ContractViolation("poles: complex poles must be a conjugate pair, Im(p2) >= 0");
    }
  }

  /// From three closed-loop eigenvalues; the first must be real.
  static PoleSpec from_eigenvalues(const Complex& l1, const Complex& l2, const Complex& l3) {
    if (l1.imag() != 0.0) {
      throw ContractViolation("poles: the first eigenvalue must be real");
    }
    PoleSpec s;
    s.p1 = -l1.real();
    s.p2 = -l2;
    s.p3 = -l3;
    if (s.p2.imag() < 0.0) std::swap(s.p2, s.p3);
    s.validate();
    return s;
  }
};

/// Passivity gains k1 = p1, k2 = p2 + p3, k3 = p2 p3 / p1. With `strict`
/// the pair must also satisfy k1 k3 >= k2^2 (damping at most 1/2).
inline Gains assign_passivity(const PoleSpec& ps, bool strict = false) {
  ps.validate();
  Gains g;
  g.k1 = ps.p1;
  g.k2 = (ps.p2 + ps.p3).real();
  g.k3 = (ps.p2 * ps.p3).real() / ps.p1;
  if (strict && g.k2 * g.k2 > g.k1 * g.k3 * (1.0 + 1e-12)) {
    throw InfeasibleError(
        "passivity: k2^2 = (p2 + p3)^2 exceeds k1 k3 = p2 p3; strict gains need a "
        "complex pair with damping <= 1/2");
  }
  return g;
}

/// Forwarding gains: k1 = p1, k3 = p2 p3 / p1 and both roots k2 of
/// k2 + k1 k3 / k2 = p2 + p3, i.e. k2 in {p2, p3}.
inline std::vector<Gains> assign_forwarding(const PoleSpec& ps) {
  ps.validate();
  if (ps.complex_pair()) {
    throw InfeasibleError(
        "forwarding: k2 + k1 k3 / k2 = p2 + p3 with k1 k3 = p2 p3 has no real k2 for "
        "complex p2, p3");
  }
  std::vector<Gains> out;
  const double a = std::min(ps.p2.real(), ps.p3.real());
  const double b = std::max(ps.p2.real(), ps.p3.real());
  for (double k2 : {a, b}) {
    Gains g;
    g.k1 = ps.p1;
    g.k2 = k2;
    g.k3 = a * b / ps.p1;
    out.push_back(g);
    if (a == b) break;
  }
  return out;
}

/// Default backstepping margin: min(0.1, Re(p2)/2) with p2 the slower pole.
inline double default_backstepping_epsilon(const PoleSpec& ps) {
  const double re = std::min(ps.p2.real(), ps.p3.real());
  return std::min(0.1, 0.5 * re);
}

/// Backstepping gains for a margin eps in (0, Re p2), p2 the slower pole:
/// k1 = p1, k2 = (Re p2 - eps)/p1, k4 = Re p3 + eps and
/// k3 = (eps^2 + (p3 - p2) eps)/p1 for real poles, (eps^2 + Im(p2)^2)/p1 otherwise.
inline Gains assign_backstepping(const PoleSpec& ps, std::optional<double> epsilon = {}) {
  ps.validate();
  const double eps = epsilon.value_or(default_backstepping_epsilon(ps));
  double lo = ps.p2.real();
  double hi = ps.p3.real();
  if (lo > hi) std::swap(lo, hi);
  if (!(eps > 0.0) || !(eps < lo)) {
    throw InfeasibleError("backstepping: epsilon must lie in (0, Re p2)");
  }
  Gains g;
  g.k1 = ps.p1;
  g.k2 = (lo - eps) / ps.p1;
  g.k4 = hi + eps;
  if (ps.complex_pair()) {
    const double im = ps.p2.imag();
    g.k3 = (eps * eps + im * im) / ps.p1;
  } else {
    g.k3 = (eps * eps + (hi - lo) * eps) / ps.p1;
  }
  return g;
}

/// Largest distance between the requested poles and the eigenvalues of J.
inline double eigenvalue_error(const Matrix3& j, const PoleSpec& ps) {
  const auto ev = closed_loop_eigenvalues(j);
  std::array<Complex, 3> want = {Complex(-ps.p1, 0.0), -ps.p2, -ps.p3};
  // Match the decoupled eigenvalue first, then the better pairing of the block.
  double err = std::abs(ev[0] - want[0]);
  const double e1 = std::max(std::abs(ev[1] - want[1]), std::abs(ev[2] - want[2]));
  const double e2 = std::max(std::abs(ev[1] - want[2]), std::abs(ev[2] - want[1]));
  return std::max(err, std::min(e1, e2));
}

}  // namespace unipark

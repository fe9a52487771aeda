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

// Scalar special functions shared by the steering laws and the certificates.
// Everything here is a pure function of its arguments.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "unipark/errors.hpp"

namespace unipark {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Distance from +-pi below which a barrier axis is considered on its boundary.
inline constexpr double kBarrierEpsilon = 1e-12;

/// Below this magnitude sinc uses its Taylor polynomial.
inline constexpr double kSincTaylorThreshold = 1e-4;

namespace detail {

inline void require_finite(double a, const char* what) {
  if (!std::isfinite(a)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

}  // namespace detail

/// sin(a)/a with sinc(0) = 1.
inline double sinc(double a) {
  detail::require_finite(a, "sinc");
  if (std::abs(a) < kSincTaylorThreshold) {
    const double a2 = a * a;
    return 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
  }
  return std::sin(a) / a;
}

/// Si(a) = integral of sinc over [0, a].
///
/// Power series for |a| <= 4, otherwise the continued fraction of E1(i a)
/// (modified Lentz), Si = pi/2 + Im E1(i a). Both branches are accurate to a
/// few ulps; the function is odd.
inline double sine_integral(double a) {
  detail::require_finite(a, "sine_integral");
  const double x = std::abs(a);
  double si = 0.0;
  if (x <= 4.0) {
    // sum (-1)^n x^(2n+1) / ((2n+1) (2n+1)!)
    double term = x;  // x^(2n+1) / (2n+1)!
    si = x;
    const double x2 = x * x;
    for (int n = 1; n < 60; ++n) {
      term *= -x2 / ((2.0 * n) * (2.0 * n + 1.0));
      const double add = term / (2.0 * n + 1.0);
      si += add;
      if (std::abs(add) < 1e-18 * std::abs(si)) break;
    }
  } else {
    using cd = std::complex<double>;
    constexpr double tiny = 1e-300;
    cd b(1.0, x);
    cd c(1.0 / tiny, 0.0);
    cd d = 1.0 / b;
    cd h = d;
    for (int i = 2; i < 1000; ++i) {
      const double an = -static_cast<double>((i - 1) * (i - 1));
      b += 2.0;
      d = 1.0 / (an * d + b);
      c = b + an / c;
      const cd del = c * d;
      h *= del;
      if (std::abs(del.real() - 1.0) + std::abs(del.imag()) <
          std::numeric_limits<double>::epsilon()) {
        break;
      }
    }
    h *= cd(std::cos(x), -std::sin(x));
    si = kPi / 2.0 + h.imag();
  }
  return a < 0.0 ? -si : si;
}

/// [sin(2z - 2 gamma) + sin(2 gamma)] / (2z), evaluated through the
/// sum-to-product identity sinc(z) cos(z - 2 gamma), so psi(0, gamma) =
/// cos(2 gamma) without a separate limit branch. |psi| <= 1.
inline double psi(double z, double gamma) {
  detail::require_finite(z, "psi");
  detail::require_finite(gamma, "psi");
  return sinc(z) * std::cos(z - 2.0 * gamma);
}

/// tan(a/2) on (-pi, pi).
inline double half_tan(double a) {
  detail::require_finite(a, "half_tan");
  if (std::abs(a) >= kPi - kBarrierEpsilon) {
    throw BarrierDomainError("half_tan: |angle| >= pi");
  }
  return std::tan(0.5 * a);
}

/// Representative of a in [-pi, pi). Identity on the fundamental domain.
inline double wrap_angle(double a) {
  detail::require_finite(a, "wrap_angle");
  if (a >= -kPi && a < kPi) return a;
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r = -kPi;
  return r;
}

}  // namespace unipark

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

// Velocity law, steering split and the steering feedback families.
//
// All closed loops share v = k1 rho cos(gamma). Most families are written as
// omega = (k1/2) sin(2 gamma) + omega_tilde(delta, gamma); the cancellation
// term turns the (delta, gamma) subsystem into
//   delta' = (k1/2) sin(2 gamma),  gamma' = -omega_tilde,
// which no longer depends on rho. The interpretable and conservative
// backstepping laws and LiBaC specify omega itself.

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "unipark/errors.hpp"
#include "unipark/kernels.hpp"
#include "unipark/state_space.hpp"

namespace unipark {

enum class ControllerId {
  Genova,
  BoLSA,
  BoPA,
  BAgAl,
  GloFo,
  BoFo,
  GloBa,
  GloBaInterpretable,
  GloBaConservative,
  BARFLi,
  LiBaC,
};

inline constexpr std::array<ControllerId, 11> kAllControllers = {
    ControllerId::Genova,    ControllerId::BoLSA,
    ControllerId::BoPA,      ControllerId::BAgAl,
    ControllerId::GloFo,     ControllerId::BoFo,
    ControllerId::GloBa,     ControllerId::GloBaInterpretable,
    ControllerId::GloBaConservative, ControllerId::BARFLi,
    ControllerId::LiBaC,
};

/// Design technique behind a controller; selects its linearization.
enum class DesignFamily { Passivity, Forwarding, Backstepping };

inline std::string_view to_string(ControllerId id) {
  switch (id) {
    case ControllerId::Genova: return "genova";
    case ControllerId::BoLSA: return "bolsa";
    case ControllerId::BoPA: return "bopa";
    case ControllerId::BAgAl: return "bagal";
    case ControllerId::GloFo: return "glofo";
    case ControllerId::BoFo: return "bofo";
    case ControllerId::GloBa: return "globa";
    case ControllerId::GloBaInterpretable: return "globa-interp";
    case ControllerId::GloBaConservative: return "globa-cons";
    case ControllerId::BARFLi: return "barfli";
    case ControllerId::LiBaC: return "libac";
  }
  return "?";
}

inline ControllerId controller_from_string(std::string_view s) {
  for (ControllerId id : kAllControllers) {
    if (to_string(id) == s) return id;
  }
  throw ConfigError("unknown controller '" + std::string(s) + "'");
}

/// Admissible state space of each law. LiBaC bounds delta only.
constexpr StateSpaceId state_space_of(ControllerId id) {
  switch (id) {
    case ControllerId::BoLSA:
    case ControllerId::BoFo:
      return StateSpaceId::S1;
    case ControllerId::BoPA:
    case ControllerId::BARFLi:
    case ControllerId::LiBaC:
      return StateSpaceId::S2;
    case ControllerId::BAgAl:
      return StateSpaceId::S3;
    default:
      return StateSpaceId::S;
  }
}

constexpr DesignFamily design_family(ControllerId id) {
  switch (id) {
    case ControllerId::Genova:
    case ControllerId::BoLSA:
    case ControllerId::BoPA:
    case ControllerId::BAgAl:
      return DesignFamily::Passivity;
    case ControllerId::GloFo:
    case ControllerId::BoFo:
      return DesignFamily::Forwarding;
    default:
      return DesignFamily::Backstepping;
  }
}

/// True for the laws that specify omega directly instead of omega_tilde.
constexpr bool specifies_total_omega(ControllerId id) {
  return id == ControllerId::GloBaInterpretable ||
         id == ControllerId::GloBaConservative || id == ControllerId::LiBaC;
}

constexpr bool uses_k4(ControllerId id) {
  return id == ControllerId::GloBa || id == ControllerId::GloBaInterpretable ||
         id == ControllerId::GloBaConservative || id == ControllerId::BARFLi;
}

struct Gains {
  double k0 = 1.0;  ///< heading-only laws
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 1.0;
  double k4 = 1.0;

  double q() const { return std::sqrt(k1 / k3); }

  /// Gain of the conservative backstepping law.
  double k5() const { return k1 * (1.0 + k2) * (1.0 + k1 * k2 * (1.0 + k2) / k3); }

  /// k1 k3 >= k2^2, needed for the strict passivity certificates.
  bool strict() const { return k1 * k3 >= k2 * k2; }

  static Gains from_vector(const double* k, std::size_t n) {
    if (n < 3 || n > 4) {
      throw ConfigError("gains: expected 3 or 4 values k1,k2,k3[,k4]");
    }
    Gains g;
    g.k1 = k[0];
    g.k2 = k[1];
    g.k3 = k[2];
    if (n == 4) g.k4 = k[3];
    return g;
  }
};

/// Throws ContractViolation if a gain the law uses is not a positive finite number.
inline void validate_gains(ControllerId id, const Gains& g) {
  auto check = [](double k, const char* name) {
    if (!std::isfinite(k) || !(k > 0.0)) {
      throw ContractViolation(std::string("gain ") + name + " must be positive and finite");
    }
  };
  check(g.k1, "k1");
  check(g.k2, "k2");
  check(g.k3, "k3");
  if (uses_k4(id)) check(g.k4, "k4");
}

struct ControlInput {
  double v = 0.0;
  double omega = 0.0;
};

/// v = k1 rho cos(gamma).
inline double velocity(const PolarState& p, double k1) {
  return k1 * p.rho * std::cos(p.gamma);
}

/// Same law from the pose, -k1 (x cos(theta) + y sin(theta)); target at the origin.
inline double velocity_cartesian(const CartesianState& c, double k1) {
  return -k1 * (c.x * std::cos(c.theta) + c.y * std::sin(c.theta));
}

/// z = gamma + atan(2 k2 delta)/2.
inline double globa_z(const Gains& g, double delta, double gamma) {
  return gamma + 0.5 * std::atan(2.0 * g.k2 * delta);
}

/// z = gamma + atan(4 k2 tan(delta/2))/2.
inline double barfli_z(const Gains& g, double delta, double gamma) {
  return gamma + 0.5 * std::atan(4.0 * g.k2 * half_tan(delta));
}

/// z = gamma + delta/2.
inline double libac_z(double delta, double gamma) { return gamma + 0.5 * delta; }

/// zeta = delta + (k1/(2 k2)) Si(2 gamma).
inline double glofo_zeta(const Gains& g, double delta, double gamma) {
  return delta + g.k1 / (2.0 * g.k2) * sine_integral(2.0 * gamma);
}

/// zeta = delta + (k1/k2) sin(gamma).
inline double bofo_zeta(const Gains& g, double delta, double gamma) {
  return delta + g.k1 / g.k2 * std::sin(gamma);
}

namespace detail {

/// cos(gamma) / (1 + tan^2(gamma/2))^2, the bounded weight of the S1 laws.
inline double bounded_los_weight(double gamma) {
  const double t = half_tan(gamma);
  const double s = 1.0 + t * t;
  return std::cos(gamma) / (s * s);
}

/// 2 (1 + t^2) t with t = tan(delta/2): derivative-weighted barrier in delta.
inline double polar_barrier(double delta) {
  const double t = half_tan(delta);
  return 2.0 * (1.0 + t * t) * t;
}

}  // namespace detail

/// Terms shared by the two alternative backstepping laws.
struct BacksteppingTerms {
  double z;
  double psi;
  double n;  ///< sqrt(1 + 4 k2^2 delta^2)
  double b;  ///< 1 + k2 / N^2
  double c;  ///< psi N - (k1 k2 / k3) B
};

inline BacksteppingTerms backstepping_terms(const Gains& g, double delta, double gamma) {
  BacksteppingTerms t{};
  t.z = globa_z(g, delta, gamma);
  t.psi = psi(t.z, gamma);
  const double n2 = 1.0 + 4.0 * g.k2 * g.k2 * delta * delta;
  t.n = std::sqrt(n2);
  t.b = 1.0 + g.k2 / n2;
  t.c = t.psi * t.n - g.k1 * g.k2 / g.k3 * t.b;
  return t;
}

/// Multiplier of z in the interpretable backstepping law.
inline double interpretable_gain_factor(const Gains& g, double delta, double gamma) {
  const BacksteppingTerms t = backstepping_terms(g, delta, gamma);
  return g.k4 + g.k3 / (2.0 * g.k2) * t.c * t.c / t.n + g.k1 * std::abs(t.psi) * t.b;
}

inline double interpretable_backstepping(const Gains& g, double delta, double gamma) {
  detail::require_finite(delta, "interpretable_backstepping");
  detail::require_finite(gamma, "interpretable_backstepping");
  return interpretable_gain_factor(g, delta, gamma) * globa_z(g, delta, gamma);
}

inline double conservative_backstepping(const Gains& g, double delta, double gamma) {
  detail::require_finite(delta, "conservative_backstepping");
  detail::require_finite(gamma, "conservative_backstepping");
  const double factor = g.k4 + g.k5() + g.k3 / g.k2 * (1.0 + 4.0 * g.k2 * g.k2 * delta * delta);
  return factor * globa_z(g, delta, gamma);
}

/// omega of LiBaC.
inline double libac_omega(const Gains& g, double delta, double gamma) {
  const double t = half_tan(delta);
  const double z = libac_z(delta, gamma);
  return g.k3 * z + 0.75 * g.k1 * std::sin(2.0 * gamma) +
         g.k2 * 0.5 * t * (1.0 + t * t) * psi(z, gamma);
}

/// The steering law proper. For the laws that specify omega, returns
/// omega - (k1/2) sin(2 gamma) so steering_total is uniform.
inline double steering_tilde(ControllerId id, const Gains& g, double delta, double gamma) {
  detail::require_finite(delta, "steering");
  detail::require_finite(gamma, "steering");
  require_inside(state_space_of(id), delta, gamma);
  const double k1 = g.k1, k2 = g.k2, k3 = g.k3;
  switch (id) {
    case ControllerId::Genova:
      return k2 * gamma + k3 * sinc(2.0 * gamma) * delta;
    case ControllerId::BoLSA:
      return k2 * std::sin(gamma) + k3 * detail::bounded_los_weight(gamma) * delta;
    case ControllerId::BoPA:
      return k2 * gamma + k3 * sinc(2.0 * gamma) * detail::polar_barrier(delta);
    case ControllerId::BAgAl:
      return k2 * std::sin(gamma) +
             k3 * detail::bounded_los_weight(gamma) * detail::polar_barrier(delta);
    case ControllerId::GloFo:
      return k2 * gamma + k3 * sinc(2.0 * gamma) * glofo_zeta(g, delta, gamma);
    case ControllerId::BoFo:
      return k2 * std::sin(gamma) +
             k3 * detail::bounded_los_weight(gamma) * bofo_zeta(g, delta, gamma);
    case ControllerId::GloBa: {
      const double z = globa_z(g, delta, gamma);
      return g.k4 * z +
             0.5 * k1 * k2 / (1.0 + 4.0 * k2 * k2 * delta * delta) * std::sin(2.0 * gamma) +
             k3 * psi(z, gamma) * delta;
    }
    case ControllerId::BARFLi: {
      const double t = half_tan(delta);
      const double z = gamma + 0.5 * std::atan(4.0 * k2 * t);
      return g.k4 * z +
             0.5 * k1 * k2 * (1.0 + t * t) / (1.0 + 16.0 * k2 * k2 * t * t) *
                 std::sin(2.0 * gamma) +
             2.0 * k3 * psi(z, gamma) * (1.0 + t * t) * t;
    }
    case ControllerId::GloBaInterpretable:
      return interpretable_backstepping(g, delta, gamma) - 0.5 * k1 * std::sin(2.0 * gamma);
    case ControllerId::GloBaConservative:
      return conservative_backstepping(g, delta, gamma) - 0.5 * k1 * std::sin(2.0 * gamma);
    case ControllerId::LiBaC:
      return libac_omega(g, delta, gamma) - 0.5 * k1 * std::sin(2.0 * gamma);
  }
  throw ContractViolation("steering_tilde: unknown controller");
}

/// omega = (k1/2) sin(2 gamma) + omega_tilde, or the law's own omega.
inline double steering_total(ControllerId id, const Gains& g, double delta, double gamma) {
  switch (id) {
    case ControllerId::GloBaInterpretable:
      require_inside(state_space_of(id), delta, gamma);
      return interpretable_backstepping(g, delta, gamma);
    case ControllerId::GloBaConservative:
      require_inside(state_space_of(id), delta, gamma);
      return conservative_backstepping(g, delta, gamma);
    case ControllerId::LiBaC:
      detail::require_finite(gamma, "steering");
      require_inside(state_space_of(id), delta, gamma);
      return libac_omega(g, delta, gamma);
    default:
      return 0.5 * g.k1 * std::sin(2.0 * gamma) + steering_tilde(id, g, delta, gamma);
  }
}

/// An immutable (law, gains) pair.
class Controller {
 public:
  Controller(ControllerId id, const Gains& g) : id_(id), gains_(g) { validate_gains(id, g); }

  ControllerId id() const { return id_; }
  const Gains& gains() const { return gains_; }
  StateSpaceId state_space() const { return state_space_of(id_); }

  /// True unless a passivity law is used with k1 k3 < k2^2.
  bool strict_condition_ok() const {
    return design_family(id_) != DesignFamily::Passivity || gains_.strict();
  }

  double omega_tilde(double delta, double gamma) const {
    return steering_tilde(id_, gains_, delta, gamma);
  }
  double omega(double delta, double gamma) const {
    return steering_total(id_, gains_, delta, gamma);
  }
  ControlInput control(const PolarState& p) const {
    return {velocity(p, gains_.k1), omega(p.delta, p.gamma)};
  }

 private:
  ControllerId id_;
  Gains gains_;
};

enum class HeadingLaw { Linear, Sine, HalfTan };

/// Turn-in-place law for rho = 0: -k0 theta, -k0 sin(theta) or -k0 tan(theta/2).
inline double heading_only(double theta, double k0, HeadingLaw law) {
  detail::require_finite(theta, "heading_only");
  switch (law) {
    case HeadingLaw::Linear:
      return -k0 * theta;
    case HeadingLaw::Sine:
      if (std::abs(theta) >= kPi) throw BarrierDomainError("heading_only: |theta| >= pi");
      return -k0 * std::sin(theta);
    case HeadingLaw::HalfTan:
      return -k0 * half_tan(theta);
  }
  return 0.0;
}

/// Certificate paired with each heading law: theta^2, or 4 tan^2(theta/2) on (-pi, pi).
inline double heading_lyapunov(double theta, HeadingLaw law) {
  if (law == HeadingLaw::Linear) return theta * theta;
  const double t = half_tan(theta);
  return 4.0 * t * t;
}

/// Closed-form dV/dt for heading_lyapunov under heading_only.
inline double heading_lyapunov_rate(double theta, double k0, HeadingLaw law) {
  const double v = heading_lyapunov(theta, law);
  if (law == HeadingLaw::HalfTan) return -k0 * (1.0 + v / 4.0) * v;
  return -2.0 * k0 * v;
}

/// Reverse parking uses v_hat = -v with the hatted angles; omega is unchanged.
inline ControlInput reverse_parking_wrap(const ControlInput& u) { return {-u.v, u.omega}; }

}  // namespace unipark

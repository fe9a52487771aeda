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

// Control Lyapunov functions of the (delta, gamma) subsystem, their
// gradients and closed-form rates, and composition with rho^2.
//
// Each controller has a certificate V_dg(delta, gamma). A full certificate
// is calV(rho^2, V_dg) or calV(V_dg, rho^2) for one of the composite forms.
// Rates are either exact time derivatives along the closed loop
// (RateFlag::Equality) or upper bounds on them (RateFlag::UpperBound).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "unipark/control.hpp"
#include "unipark/dynamics.hpp"
#include "unipark/errors.hpp"
#include "unipark/kernels.hpp"
#include "unipark/state_space.hpp"

namespace unipark {

enum class RateFlag { Equality, UpperBound };

inline std::string_view to_string(RateFlag f) {
  return f == RateFlag::Equality ? "equality" : "upper_bound";
}

/// Partial derivatives with respect to (delta, gamma).
using Grad2 = std::array<double, 2>;
/// Partial derivatives with respect to (rho, delta, gamma).
using Grad3 = std::array<double, 3>;

/// Backstepping and forwarding residuals. Unused entries are 0.
struct TransformedCoords {
  double z = 0.0;
  double zeta = 0.0;
  double pi = 0.0;  ///< z^2
};

inline TransformedCoords transformed_coords(ControllerId id, const Gains& g, double delta,
                                            double gamma) {
  TransformedCoords t;
  switch (id) {
    case ControllerId::GloFo: t.zeta = glofo_zeta(g, delta, gamma); break;
    case ControllerId::BoFo: t.zeta = bofo_zeta(g, delta, gamma); break;
    case ControllerId::GloBa:
    case ControllerId::GloBaInterpretable:
    case ControllerId::GloBaConservative: t.z = globa_z(g, delta, gamma); break;
    case ControllerId::BARFLi: t.z = barfli_z(g, delta, gamma); break;
    case ControllerId::LiBaC: t.z = libac_z(delta, gamma); break;
    default: break;
  }
  t.pi = t.z * t.z;
  return t;
}

/// Energy of the passivity designs, U = U1 + q^2 U2 with U1 = Delta^2, U2 = Gamma^2.
struct EnergyU {
  double u = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

inline EnergyU energy_u(const Gains& g, StateSpaceId ss, double delta, double gamma) {
  const double d = big_delta(delta, ss).value;
  const double c = big_gamma(gamma, ss).value;
  const double q2 = g.k1 / g.k3;
  return {d * d + q2 * c * c, d * d, c * c};
}

/// dU/dt = -2 k2 q^2 Gamma^2 along any of the four passivity closed loops.
inline double energy_u_rate(const Gains& g, StateSpaceId ss, double gamma) {
  const double c = big_gamma(gamma, ss).value;
  return -2.0 * g.k2 * (g.k1 / g.k3) * c * c;
}

namespace detail {

/// Constant of the cubic passivity certificates on S2 and S3.
inline double cubic_a(ControllerId id, const Gains& g) {
  const double q = g.q();
  const double inner = id == ControllerId::BoPA ? g.k1 * g.k3 : g.k1 * g.k2;
  return std::max(g.k1 * q, std::sqrt(inner));
}

struct PassivityParts {
  double v;
  double dv_dd;  ///< d/d Delta
  double dv_dg;  ///< d/d Gamma
};

inline PassivityParts passivity_clf(ControllerId id, const Gains& g, double d, double c) {
  const double q = g.q();
  const double q2 = q * q;
  const double u = d * d + q2 * c * c;
  const double cross = d + q * c;
  double v = 0.0;
  double dv_du = 0.0;
  if (id == ControllerId::Genova || id == ControllerId::BoLSA) {
    v = g.k3 * (1.0 + (2.0 * q2 + u) / (2.0 * q * g.k2)) * u;
    dv_du = g.k3 * (1.0 + (q2 + u) / (q * g.k2));
  } else {
    const double at = cubic_a(id, g) / (3.0 * g.k2 * q2);
    const double w = 1.0 + u;
    v = at * (w * w * w - 1.0);
    dv_du = 3.0 * at * w * w;
  }
  v += cross * cross;
  return {v, dv_du * 2.0 * d + 2.0 * cross, dv_du * 2.0 * q2 * c + 2.0 * q * cross};
}

}  // namespace detail

/// V_dg. Throws BarrierDomainError outside the controller's state space.
inline double clf_dg_value(ControllerId id, const Gains& g, double delta, double gamma) {
  const StateSpaceId ss = state_space_of(id);
  require_inside(ss, delta, gamma);
  const double q2 = g.k1 / g.k3;
  switch (design_family(id)) {
    case DesignFamily::Passivity: {
      const double d = big_delta(delta, ss).value;
      const double c = big_gamma(gamma, ss).value;
      return detail::passivity_clf(id, g, d, c).v;
    }
    case DesignFamily::Forwarding: {
      if (id == ControllerId::GloFo) {
        const double zeta = glofo_zeta(g, delta, gamma);
        return zeta * zeta + q2 * gamma * gamma;
      }
      const double zeta = bofo_zeta(g, delta, gamma);
      const double t = half_tan(gamma);
      return zeta * zeta + 4.0 * q2 * t * t;
    }
    case DesignFamily::Backstepping:
      break;
  }
  if (id == ControllerId::BARFLi) {
    const double t = half_tan(delta);
    const double z = barfli_z(g, delta, gamma);
    return 4.0 * t * t + q2 * z * z;
  }
  if (id == ControllerId::LiBaC) {
    const double t = half_tan(delta);
    const double z = libac_z(delta, gamma);
    return t * t + g.k1 / g.k2 * z * z;
  }
  const double z = globa_z(g, delta, gamma);
  return delta * delta + q2 * z * z;
}

inline Grad2 clf_dg_gradient(ControllerId id, const Gains& g, double delta, double gamma) {
  const StateSpaceId ss = state_space_of(id);
  require_inside(ss, delta, gamma);
  const double q2 = g.k1 / g.k3;
  switch (design_family(id)) {
    case DesignFamily::Passivity: {
      const AxisValue d = big_delta(delta, ss);
      const AxisValue c = big_gamma(gamma, ss);
      const auto parts = detail::passivity_clf(id, g, d.value, c.value);
      return {parts.dv_dd * d.derivative, parts.dv_dg * c.derivative};
    }
    case DesignFamily::Forwarding: {
      if (id == ControllerId::GloFo) {
        const double zeta = glofo_zeta(g, delta, gamma);
        return {2.0 * zeta,
                2.0 * zeta * g.k1 / g.k2 * sinc(2.0 * gamma) + 2.0 * q2 * gamma};
      }
      const double zeta = bofo_zeta(g, delta, gamma);
      const double t = half_tan(gamma);
      return {2.0 * zeta,
              2.0 * zeta * g.k1 / g.k2 * std::cos(gamma) + 4.0 * q2 * t * (1.0 + t * t)};
    }
    case DesignFamily::Backstepping:
      break;
  }
  if (id == ControllerId::BARFLi) {
    const double t = half_tan(delta);
    const double s = 1.0 + t * t;
    const double z = barfli_z(g, delta, gamma);
    const double dz_dd = g.k2 * s / (1.0 + 16.0 * g.k2 * g.k2 * t * t);
    return {4.0 * t * s + 2.0 * q2 * z * dz_dd, 2.0 * q2 * z};
  }
  if (id == ControllerId::LiBaC) {
    const double t = half_tan(delta);
    const double z = libac_z(delta, gamma);
    const double r = g.k1 / g.k2;
    return {t * (1.0 + t * t) + r * z, 2.0 * r * z};
  }
  const double z = globa_z(g, delta, gamma);
  const double dz_dd = g.k2 / (1.0 + 4.0 * g.k2 * g.k2 * delta * delta);
  return {2.0 * delta + 2.0 * q2 * z * dz_dd, 2.0 * q2 * z};
}

inline RateFlag clf_dg_rate_flag(ControllerId id) {
  switch (id) {
    case ControllerId::GloFo:
    case ControllerId::BoFo:
    case ControllerId::GloBa:
    case ControllerId::BARFLi:
    case ControllerId::LiBaC:
      return RateFlag::Equality;
    default:
      return RateFlag::UpperBound;
  }
}

/// Closed-form rate of V_dg along the closed loop (see clf_dg_rate_flag).
/// The passivity bounds assume k1 k3 >= k2^2.
inline double clf_dg_rate(ControllerId id, const Gains& g, double delta, double gamma) {
  require_inside(state_space_of(id), delta, gamma);
  const double k1 = g.k1, k2 = g.k2, k3 = g.k3;
  const double q = g.q();
  const double q2 = q * q;
  switch (id) {
    case ControllerId::Genova: {
      const double c = delta + q * gamma;
      const double g2 = gamma * gamma;
      return -2.0 * k1 * k2 * g2 - 1.5 * k2 * c * c - 2.0 * k1 * q * g2 * g2;
    }
    case ControllerId::BoLSA: {
      const double t = half_tan(gamma);
      const double v0 = 4.0 * t * t;
      const double c = delta + q * t;
      return -2.0 * k1 * k2 * v0 - 1.5 * k2 * c * c - 2.0 * k1 * q * v0 * v0;
    }
    case ControllerId::BoPA: {
      const double a = detail::cubic_a(id, g);
      const double c = half_tan(delta) + q * gamma;
      const double g2 = gamma * gamma;
      return -1.5 * k2 * c * c - 4.0 * a * q2 * g2 * g2;
    }
    case ControllerId::BAgAl: {
      const double a = detail::cubic_a(id, g);
      const double tg = half_tan(gamma);
      const double c = half_tan(delta) + q * tg;
      return -16.0 * a * q2 * tg * tg * tg * tg - 1.5 * k2 * c * c;
    }
    case ControllerId::GloFo: {
      const double a = k3 / k2 * sinc(2.0 * gamma) * glofo_zeta(g, delta, gamma);
      return -(k1 * k2 / k3) * (a * a + gamma * gamma + (a + gamma) * (a + gamma));
    }
    case ControllerId::BoFo: {
      const double t = half_tan(gamma);
      const double a = k3 / k2 * std::cos(gamma) / (1.0 + t * t) * bofo_zeta(g, delta, gamma);
      const double b = 2.0 * t;
      return -(k1 * k2 / k3) * (a * a + b * b + (a + b) * (a + b));
    }
    case ControllerId::GloBa: {
      const double z = globa_z(g, delta, gamma);
      const double n = std::sqrt(1.0 + 4.0 * k2 * k2 * delta * delta);
      return -2.0 * k1 * k2 * delta * delta / n - 2.0 * q2 * g.k4 * z * z;
    }
    case ControllerId::GloBaInterpretable:
    case ControllerId::GloBaConservative: {
      const double z = globa_z(g, delta, gamma);
      const double n = std::sqrt(1.0 + 4.0 * k2 * k2 * delta * delta);
      return -k1 * k2 * delta * delta / n - 2.0 * q2 * g.k4 * z * z;
    }
    case ControllerId::BARFLi: {
      const double t = half_tan(delta);
      const double z = barfli_z(g, delta, gamma);
      const double n = std::sqrt(1.0 + 16.0 * k2 * k2 * t * t);
      return -8.0 * k1 * k2 * (1.0 + t * t) * t * t / n - 2.0 * g.k4 * q2 * z * z;
    }
    case ControllerId::LiBaC: {
      const double t = half_tan(delta);
      const double z = libac_z(delta, gamma);
      return -k1 * t * t - 2.0 * k1 * k3 / k2 * z * z;
    }
  }
  throw ContractViolation("clf_dg_rate: unknown controller");
}

/// The seven admissible outer functions calV(r, s).
enum class CompositeKind { Sum, LogSum, ExpSum, ExpProduct, Bilinear, CoshSum, SqrtSum };

inline constexpr std::array<CompositeKind, 7> kAllComposites = {
    CompositeKind::Sum,      CompositeKind::LogSum,  CompositeKind::ExpSum,
    CompositeKind::ExpProduct, CompositeKind::Bilinear, CompositeKind::CoshSum,
    CompositeKind::SqrtSum,
};

/// Which argument slot receives rho^2.
enum class CompositeOrder { RhoFirst, VFirst };

inline std::string_view to_string(CompositeKind k) {
  switch (k) {
    case CompositeKind::Sum: return "sum";
    case CompositeKind::LogSum: return "log-sum";
    case CompositeKind::ExpSum: return "exp-sum";
    case CompositeKind::ExpProduct: return "exp-product";
    case CompositeKind::Bilinear: return "bilinear";
    case CompositeKind::CoshSum: return "cosh-sum";
    case CompositeKind::SqrtSum: return "sqrt-sum";
  }
  return "?";
}

inline CompositeKind composite_from_string(std::string_view s) {
  for (CompositeKind k : kAllComposites) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown composite '" + std::string(s) + "'");
}

struct CompositeEval {
  double value;
  double d_r;
  double d_s;
};

inline CompositeEval composite_eval(CompositeKind k, double r, double s) {
  switch (k) {
    case CompositeKind::Sum:
      return {r + s, 1.0, 1.0};
    case CompositeKind::LogSum:
      return {std::log1p(r) + s, 1.0 / (1.0 + r), 1.0};
    case CompositeKind::ExpSum:
      return {std::expm1(r) + s, std::exp(r), 1.0};
    case CompositeKind::ExpProduct: {
      const double e = std::exp(s);
      return {(1.0 + r) * e - 1.0, e, (1.0 + r) * e};
    }
    case CompositeKind::Bilinear:
      return {r + s + r * s, 1.0 + s, 1.0 + r};
    case CompositeKind::CoshSum:
      return {std::cosh(r) - 1.0 + s, std::sinh(r), 1.0};
    case CompositeKind::SqrtSum: {
      const double a = std::sqrt(1.0 + r);
      const double b = std::sqrt(1.0 + s);
      return {a + b - 2.0, 0.5 / a, 0.5 / b};
    }
  }
  throw ContractViolation("composite_eval: unknown form");
}

/// Evaluable certificate in (rho, delta, gamma).
struct LyapunovFn {
  ControllerId family = ControllerId::Genova;
  Gains gains;
  StateSpaceId space = StateSpaceId::S;
  RateFlag flag = RateFlag::Equality;
  std::function<double(const PolarState&)> value;
  std::function<Grad3(const PolarState&)> gradient;
  /// Closed-form rate; empty when none is known.
  std::function<double(const PolarState&)> rate;
};

/// A (delta, gamma) certificate given by callables, input to composite().
struct DeltaGammaFn {
  std::function<double(double, double)> value;
  std::function<Grad2(double, double)> gradient;
  std::function<double(double, double)> rate;  ///< optional
  RateFlag flag = RateFlag::Equality;
};

inline DeltaGammaFn delta_gamma_clf(ControllerId id, const Gains& g) {
  DeltaGammaFn f;
  f.value = [id, g](double d, double c) { return clf_dg_value(id, g, d, c); };
  f.gradient = [id, g](double d, double c) { return clf_dg_gradient(id, g, d, c); };
  f.rate = [id, g](double d, double c) { return clf_dg_rate(id, g, d, c); };
  f.flag = clf_dg_rate_flag(id);
  return f;
}

/// Points at which composite() checks that both partials of calV are positive.
inline constexpr std::array<std::array<double, 2>, 4> kCompositeProbes = {{
    {0.5, 0.5}, {1.0, 0.1}, {0.1, 1.0}, {2.0, 2.0},
}};

/// (delta, gamma) samples, interior to every state space, at which V_dg must be positive.
inline constexpr std::array<std::array<double, 2>, 6> kDeltaGammaProbes = {{
    {0.5, 0.5}, {-1.0, 0.3}, {0.2, -2.0}, {2.5, 1.0}, {-0.01, 0.0}, {0.0, 3.0},
}};

/// calV(rho^2, V_dg) or calV(V_dg, rho^2) with chain-rule gradient. The rate,
/// when V_dg has one, is d_r calV * (rho^2)' + d_s calV * rate; rho^2 decays
/// exactly as -2 k1 rho^2 cos^2(gamma), so the flag of V_dg carries over.
inline LyapunovFn composite(const DeltaGammaFn& vdg, CompositeKind kind, CompositeOrder order,
                            const Gains& g, StateSpaceId space,
                            ControllerId family = ControllerId::Genova) {
  if (!vdg.value || !vdg.gradient) {
    throw ContractViolation("composite: V_dg needs a value and a gradient");
  }
  if (vdg.value(0.0, 0.0) != 0.0) {
    throw ContractViolation("composite: V_dg must vanish at the origin");
  }
  for (const auto& pr : kDeltaGammaProbes) {
    if (!(vdg.value(pr[0], pr[1]) > 0.0)) {
      throw ContractViolation("composite: V_dg is not positive at a probe point");
    }
  }
  for (const auto& pr : kCompositeProbes) {
    const CompositeEval e = composite_eval(kind, pr[0], pr[1]);
    if (!(e.d_r > 0.0) || !(e.d_s > 0.0)) {
      throw ContractViolation("composite: outer function partials must be positive");
    }
  }
  const bool rho_first = order == CompositeOrder::RhoFirst;
  auto outer = [kind, rho_first](double r2, double v) {
    CompositeEval e = rho_first ? composite_eval(kind, r2, v) : composite_eval(kind, v, r2);
    if (!rho_first) std::swap(e.d_r, e.d_s);
    return e;  // d_r is now d/d(rho^2), d_s is d/dV_dg
  };
  LyapunovFn out;
  out.family = family;
  out.gains = g;
  out.space = space;
  out.flag = vdg.flag;
  out.value = [vdg, outer](const PolarState& p) {
    return outer(p.rho * p.rho, vdg.value(p.delta, p.gamma)).value;
  };
  out.gradient = [vdg, outer](const PolarState& p) {
    const CompositeEval e = outer(p.rho * p.rho, vdg.value(p.delta, p.gamma));
    const Grad2 gi = vdg.gradient(p.delta, p.gamma);
    return Grad3{e.d_r * 2.0 * p.rho, e.d_s * gi[0], e.d_s * gi[1]};
  };
  if (vdg.rate) {
    out.rate = [vdg, outer, k1 = g.k1](const PolarState& p) {
      const double r2 = p.rho * p.rho;
      const CompositeEval e = outer(r2, vdg.value(p.delta, p.gamma));
      const double c = std::cos(p.gamma);
      return e.d_r * (-2.0 * k1 * r2 * c * c) + e.d_s * vdg.rate(p.delta, p.gamma);
    };
  }
  return out;
}

/// The certificate of controller `id`, composed with rho^2.
inline LyapunovFn make_clf(ControllerId id, const Gains& g,
                          CompositeKind kind = CompositeKind::Sum,
                          CompositeOrder order = CompositeOrder::RhoFirst) {
  return composite(delta_gamma_clf(id, g), kind, order, g, state_space_of(id), id);
}

inline double clf_value(ControllerId id, const Gains& g, const PolarState& p,
                        CompositeKind kind = CompositeKind::Sum,
                        CompositeOrder order = CompositeOrder::RhoFirst) {
  return make_clf(id, g, kind, order).value(p);
}

struct RateValue {
  double value;
  RateFlag flag;
};

/// Closed-form rate of V_dg with its flag.
inline RateValue clf_rate(ControllerId id, const Gains& g, const PolarState& p) {
  return {clf_dg_rate(id, g, p.delta, p.gamma), clf_dg_rate_flag(id)};
}

using PolarField = std::function<PolarRate(const PolarState&)>;

/// grad V . f from the analytic gradient.
inline double directional_derivative(const LyapunovFn& v, const PolarField& f,
                                     const PolarState& p) {
  const Grad3 gr = v.gradient(p);
  const PolarRate r = f(p);
  return gr[0] * r.rho + gr[1] * r.delta + gr[2] * r.gamma;
}

namespace detail {

inline PolarState rk4_step(const PolarField& f, const PolarState& p, double h) {
  auto add = [](const PolarState& s, const PolarRate& r, double a) {
    return PolarState{s.rho + a * r.rho, s.delta + a * r.delta, s.gamma + a * r.gamma};
  };
  const PolarRate a = f(p);
  const PolarRate b = f(add(p, a, 0.5 * h));
  const PolarRate c = f(add(p, b, 0.5 * h));
  const PolarRate d = f(add(p, c, h));
  return {p.rho + h / 6.0 * (a.rho + 2.0 * b.rho + 2.0 * c.rho + d.rho),
          p.delta + h / 6.0 * (a.delta + 2.0 * b.delta + 2.0 * c.delta + d.delta),
          p.gamma + h / 6.0 * (a.gamma + 2.0 * b.gamma + 2.0 * c.gamma + d.gamma)};
}

}  // namespace detail

/// dV/dt estimated from the flow itself: central differences of V along
/// RK4 flow steps of +-h, Richardson-extrapolated over h and h/2. With
/// h <= 0 the step is 1e-3 / (1 + |f(p)|_inf), short enough for the fast
/// steering near a barrier.
inline double flow_difference_step(const PolarField& f, const PolarState& p) {
  const PolarRate r = f(p);
  return 1e-3 / (1.0 + std::max({std::abs(r.rho), std::abs(r.delta), std::abs(r.gamma)}));
}

inline double flow_difference_derivative(const LyapunovFn& v, const PolarField& f,
                                         const PolarState& p, double h = 0.0) {
  if (!(h > 0.0)) h = flow_difference_step(f, p);
  auto central = [&](double s) {
    const double vp = v.value(detail::rk4_step(f, p, s));
    const double vm = v.value(detail::rk4_step(f, p, -s));
    return (vp - vm) / (2.0 * s);
  };
  const double d1 = central(h);
  const double d2 = central(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

/// Closed-loop field of controller `id` as a PolarField.
inline PolarField closed_loop(ControllerId id, const Gains& g) {
  return [id, g](const PolarState& p) { return closed_loop_field(id, g, p); };
}

/// Non-strict certificate V_G = rho^2 + k3 U of the Genova law and its exact rate.
struct ValueRate {
  double value;
  double rate;
};

inline ValueRate genova_nonstrict(const Gains& g, const PolarState& p) {
  const double u = energy_u(g, StateSpaceId::S, p.delta, p.gamma).u;
  const double c = std::cos(p.gamma);
  return {p.rho * p.rho + g.k3 * u,
          -2.0 * g.k1 * p.rho * p.rho * c * c - 2.0 * g.k1 * g.k2 * p.gamma * p.gamma};
}

/// Slack of the two scalar inequalities used by the passivity proofs,
///   1 - k sinc(2x) <= k x^2,
///   1 - k cos(x)(1 + cos(x)) <= 2 (1 + k) tan^2(x/2).
/// slack = right-hand side - left-hand side.
struct AppendixBounds {
  bool first_holds;
  bool second_holds;
  double first_slack;
  double second_slack;
};

inline AppendixBounds appendix_bounds_check(double k, double x, double tol = 0.0) {
  if (!std::isfinite(k) || k < 1.0) {
    throw ContractViolation("appendix_bounds_check: requires k >= 1");
  }
  detail::require_finite(x, "appendix_bounds_check");
  const double s1 = k * x * x - (1.0 - k * sinc(2.0 * x));
  const double t = std::tan(0.5 * x);
  const double c = std::cos(x);
  const double s2 = 2.0 * (1.0 + k) * t * t - (1.0 - k * c * (1.0 + c));
  return {s1 >= -tol, s2 >= -tol, s1, s2};
}

}  // namespace unipark

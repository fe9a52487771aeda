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

// Sampled certificate checks: definiteness, gradients, rates, barrier
// blow-up, linearizations and the scalar bounds behind the passivity proofs.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "unipark/control.hpp"
#include "unipark/linearization.hpp"
#include "unipark/lyapunov.hpp"
#include "unipark/state_space.hpp"

namespace unipark {

/// Controllers whose certificates come with a strictness theorem.
inline constexpr std::array<ControllerId, 8> kTheoremControllers = {
    ControllerId::Genova, ControllerId::BoLSA, ControllerId::BoPA,  ControllerId::BAgAl,
    ControllerId::GloFo,  ControllerId::BoFo,  ControllerId::GloBa, ControllerId::BARFLi,
};

/// Outcome of one check. `worst` is the check's own figure of merit
/// (largest error or smallest slack) and `limit` the value it is compared to.
struct CheckResult {
  std::string name;
  std::string subject;
  bool passed = true;
  double worst = 0.0;
  double limit = 0.0;
  std::size_t samples = 0;
  std::string detail;
};

inline CheckResult make_check(std::string name, std::string subject) {
  CheckResult r;
  r.name = std::move(name);
  r.subject = std::move(subject);
  return r;
}

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  double free_range = 3.0;      ///< |angle| bound on free axes
  double barrier_inset = 0.05;  ///< |angle| <= pi - inset on barrier axes
  double rho_max = 3.0;
  double gradient_tol = 1e-6;
  double equality_tol = 1e-9;
  double upper_slack = 1e-12;
  double jacobian_tol = 1e-6;
  double bounds_step = 1e-3;
};

/// Seeded samples of the interior of the controller's state space, origin excluded.
inline std::vector<PolarState> sample_interior(StateSpaceId ss, std::size_t n, std::uint64_t seed,
                                               const VerifyOptions& o = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rho(0.0, o.rho_max);
  std::uniform_real_distribution<double> free_axis(-o.free_range, o.free_range);
  std::uniform_real_distribution<double> barrier(-(kPi - o.barrier_inset), kPi - o.barrier_inset);
  std::vector<PolarState> out;
  out.reserve(n);
  while (out.size() < n) {
    PolarState p{rho(rng), delta_bounded(ss) ? barrier(rng) : free_axis(rng),
                 gamma_bounded(ss) ? barrier(rng) : free_axis(rng)};
    if (p.rho == 0.0 && p.delta == 0.0 && p.gamma == 0.0) continue;
    out.push_back(p);
  }
  return out;
}

/// Random gains in [lo, hi] with k1 k3 >= k2^2.
inline std::vector<Gains> sample_strict_gains(std::size_t n, std::uint64_t seed, double lo = 0.5,
                                              double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Gains> out;
  while (out.size() < n) {
    Gains g;
    g.k1 = u(rng);
    g.k2 = u(rng);
    g.k3 = u(rng);
    g.k4 = u(rng);
    if (g.strict()) out.push_back(g);
  }
  return out;
}

/// V > 0 at every sample and V(0) = 0.
inline CheckResult check_positive_definite(const LyapunovFn& v,
                                           const std::vector<PolarState>& pts) {
  CheckResult r = make_check("positive_definite", std::string(to_string(v.family)));
  r.samples = pts.size();
  r.worst = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    const double val = v.value(p);
    r.worst = std::min(r.worst, val);
    if (!(val > 0.0)) r.passed = false;
  }
  const double at0 = v.value({0.0, 0.0, 0.0});
  if (at0 != 0.0) {
    r.passed = false;
    r.detail = "V(0) = " + std::to_string(at0);
  }
  return r;
}

/// Analytic gradient against central differences, error relative to the
/// gradient's max-norm (floored at 1e-6 so the origin is not ill-posed).
inline CheckResult check_gradient(const LyapunovFn& v, const std::vector<PolarState>& pts,
                                  double tol = 1e-6) {
  CheckResult r = make_check("gradient_fd", std::string(to_string(v.family)));
  r.samples = pts.size();
  r.limit = tol;
  for (const auto& p : pts) {
    const Grad3 g = v.gradient(p);
    std::array<double, 3> x{p.rho, p.delta, p.gamma};
    double err = 0.0;
    double scale = 1e-6;
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
      auto at = [&](double s) {
        std::array<double, 3> y = x;
        y[i] += s;
        return v.value({y[0], y[1], y[2]});
      };
      const double fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
      err = std::max(err, std::abs(fd - g[i]));
      scale = std::max(scale, std::abs(g[i]));
    }
    r.worst = std::max(r.worst, err / scale);
  }
  r.passed = r.worst < tol;
  return r;
}

/// Closed-form rate of V_dg against grad V_dg . f along the closed loop.
/// Equality rates must match to rel. `eq_tol`; upper bounds must dominate
/// with slack >= -`slack`. `worst` is the largest relative error or the
/// smallest slack, respectively.
inline CheckResult check_rate(ControllerId id, const Gains& g, const std::vector<PolarState>& pts,
                              double eq_tol = 1e-9, double slack = 1e-12) {
  const RateFlag flag = clf_dg_rate_flag(id);
  CheckResult r = make_check(flag == RateFlag::Equality ? "rate_equality" : "rate_upper_bound",
                             std::string(to_string(id)));
  r.samples = pts.size();
  r.limit = flag == RateFlag::Equality ? eq_tol : -slack;
  r.worst = flag == RateFlag::Equality ? 0.0 : std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (const auto& p : pts) {
    const Grad2 gr = clf_dg_gradient(id, g, p.delta, p.gamma);
    const PolarRate f = closed_loop_field(id, g, p);
    const double dd = gr[0] * f.delta + gr[1] * f.gamma;
    const double rate = clf_dg_rate(id, g, p.delta, p.gamma);
    if (flag == RateFlag::Equality) {
      const double rel = std::abs(rate - dd) / std::max({std::abs(rate), std::abs(dd), 1e-300});
      r.worst = std::max(r.worst, rel);
    } else {
      r.worst = std::min(r.worst, rate - dd);
      max_gap = std::max(max_gap, std::abs(rate - dd));
    }
  }
  if (flag == RateFlag::Equality) {
    r.passed = r.worst <= eq_tol;
  } else {
    r.passed = r.worst >= -slack;
    r.detail = "max |rate - dV/dt| = " + std::to_string(max_gap) +
               (max_gap > 1e-9 ? " (bound is not attained)" : " (equality holds)");
  }
  return r;
}

/// grad V . f against the flow-difference estimate. The allowance is
/// tol * max(1, |grad V . f|) plus the rounding floor of the difference
/// quotient, 64 eps (|V| + |grad V . p|) / h: the second term is the change
/// of V under a rounding-sized perturbation of the state, large near a
/// barrier. `worst` is the largest error in units of allowance. The
/// interpretable backstepping field has a kink where psi changes sign; points
/// whose flow steps straddle it are skipped and counted in `detail`.
inline CheckResult check_flow_derivative(const LyapunovFn& v, const std::vector<PolarState>& pts,
                                         double tol = 1e-6) {
  CheckResult r = make_check("flow_difference", std::string(to_string(v.family)));
  r.samples = pts.size();
  r.limit = 1.0;
  const PolarField f = closed_loop(v.family, v.gains);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::size_t skipped = 0;
  for (const auto& p : pts) {
    const double h = flow_difference_step(f, p);
    if (v.family == ControllerId::GloBaInterpretable) {
      auto psi_at = [&](const PolarState& q) {
        return psi(globa_z(v.gains, q.delta, q.gamma), q.gamma);
      };
      const double lo = psi_at(detail::rk4_step(f, p, -h));
      const double hi = psi_at(detail::rk4_step(f, p, h));
      if (!(lo * hi > 0.0) || !(lo * psi_at(p) > 0.0)) {
        ++skipped;
        continue;
      }
    }
    const double a = directional_derivative(v, f, p);
    const double b = flow_difference_derivative(v, f, p, h);
    const Grad3 gr = v.gradient(p);
    const double cond = std::abs(gr[0] * p.rho) + std::abs(gr[1] * p.delta) + std::abs(gr[2] * p.gamma);
    const double allow = tol * std::max(1.0, std::abs(a)) + 64.0 * eps * (std::abs(v.value(p)) + cond) / h;
    r.worst = std::max(r.worst, std::abs(a - b) / allow);
  }
  if (skipped > 0) r.detail = std::to_string(skipped) + " points on the psi = 0 kink skipped";
  r.passed = r.worst <= 1.0;
  return r;
}

/// V_dg grows without bound as each barrier axis approaches +-pi.
inline CheckResult check_barrier_blowup(ControllerId id, const Gains& g) {
  const StateSpaceId ss = state_space_of(id);
  CheckResult r = make_check("barrier_blowup", std::string(to_string(id)));
  r.limit = 1e6;
  r.worst = std::numeric_limits<double>::infinity();
  if (!delta_bounded(ss) && !gamma_bounded(ss)) {
    r.detail = "no barrier axis";
    r.worst = 0.0;
    r.limit = 0.0;
    return r;
  }
  for (int axis = 0; axis < 2; ++axis) {
    if ((axis == 0 && !delta_bounded(ss)) || (axis == 1 && !gamma_bounded(ss))) continue;
    for (double sign : {-1.0, 1.0}) {
      for (double other : {-0.5, 0.0, 0.5}) {
        double prev = -1.0;
        for (int k = 1; k <= 10; ++k) {
          const double a = sign * (kPi - std::pow(10.0, -k));
          const double v = axis == 0 ? clf_dg_value(id, g, a, other) : clf_dg_value(id, g, other, a);
          ++r.samples;
          if (!(v > prev)) r.passed = false;
          prev = v;
        }
        r.worst = std::min(r.worst, prev);
      }
    }
  }
  if (!(r.worst > r.limit)) r.passed = false;
  return r;
}

/// Analytic linearization against central differences at (1e-6, 0, 0).
inline CheckResult check_jacobian(ControllerId id, const Gains& g, double tol = 1e-6) {
  CheckResult r = make_check("jacobian_fd", std::string(to_string(id)));
  r.limit = tol;
  r.samples = 1;
  const Matrix3 a = jacobian(design_family(id), g);
  const Matrix3 f = fd_jacobian(id, g, {1e-6, 0.0, 0.0});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.worst = std::max(r.worst, std::abs(a[i][j] - f[i][j]));
  }
  r.passed = r.worst < tol;
  return r;
}

/// Both scalar bounds on k in {1..10}, x in [-20, 20] with the given step.
inline std::array<CheckResult, 2> check_appendix_bounds(double step = 1e-3,
                                                        double slack = 1e-12) {
  std::array<CheckResult, 2> r{make_check("sinc_bound", "k*x^2"),
                               make_check("cos_bound", "2(1+k)tan^2(x/2)")};
  for (auto& c : r) {
    c.limit = -slack;
    c.worst = std::numeric_limits<double>::infinity();
  }
  const auto n = static_cast<long>(std::llround(40.0 / step));
  for (int k = 1; k <= 10; ++k) {
    for (long i = 0; i <= n; ++i) {
      const double x = -20.0 + static_cast<double>(i) * step;
      const AppendixBounds b = appendix_bounds_check(static_cast<double>(k), x);
      r[0].worst = std::min(r[0].worst, b.first_slack);
      r[1].worst = std::min(r[1].worst, b.second_slack);
      ++r[0].samples;
      ++r[1].samples;
    }
  }
  for (auto& c : r) c.passed = c.worst >= -slack;
  return r;
}

/// Round trip of eigenvalue assignment over random feasible pole sets.
inline CheckResult check_gain_assignment(DesignFamily fam, std::size_t n, std::uint64_t seed,
                                         double tol = 1e-10) {
  CheckResult r = make_check("gain_assignment", std::string(to_string(fam)));
  r.limit = tol;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  std::bernoulli_distribution complex_pair(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    PoleSpec ps;
    ps.p1 = u(rng);
    const bool cplx = fam != DesignFamily::Forwarding && complex_pair(rng);
    if (cplx) {
      const double re = u(rng);
      const double im = u(rng);
      ps.p2 = {re, im};
      ps.p3 = {re, -im};
    } else {
      ps.p2 = {u(rng), 0.0};
      ps.p3 = {u(rng), 0.0};
    }
    std::vector<Gains> gs;
    if (fam == DesignFamily::Passivity) {
      gs.push_back(assign_passivity(ps));
    } else if (fam == DesignFamily::Forwarding) {
      gs = assign_forwarding(ps);
    } else {
      gs.push_back(assign_backstepping(ps));
    }
    for (const Gains& g : gs) {
      // Errors are measured relative to the pole magnitudes.
      const double scale = std::max({1.0, ps.p1, std::abs(ps.p2), std::abs(ps.p3)});
      r.worst = std::max(r.worst, eigenvalue_error(jacobian(fam, g), ps) / scale);
      ++r.samples;
      if (!(g.k1 > 0 && g.k2 > 0 && g.k3 > 0 && g.k4 > 0)) {
        r.passed = false;
        r.detail = "non-positive gain";
      }
    }
  }
  if (!(r.worst < tol)) r.passed = false;
  return r;
}

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

/// The full suite for one gain vector: every theorem certificate plus the
/// alternative backstepping laws and LiBaC, linearizations, gain assignment
/// and the scalar bounds.
inline VerifyReport run_verification(const Gains& g, const VerifyOptions& o = {}) {
  VerifyReport rep;
  std::uint64_t salt = 0;
  for (ControllerId id : kAllControllers) {
    const StateSpaceId ss = state_space_of(id);
    const auto pts = sample_interior(ss, o.samples, o.seed + 7919 * (++salt), o);
    const LyapunovFn v = make_clf(id, g);
    rep.checks.push_back(check_positive_definite(v, pts));
    rep.checks.push_back(check_gradient(v, pts, o.gradient_tol));
    const bool needs_strict = design_family(id) == DesignFamily::Passivity;
    if (!needs_strict || g.strict()) {
      rep.checks.push_back(check_rate(id, g, pts, o.equality_tol, o.upper_slack));
    }
    std::vector<PolarState> few(pts.begin(), pts.begin() + std::min<std::size_t>(pts.size(), 50));
    rep.checks.push_back(check_flow_derivative(v, few));
    if (ss != StateSpaceId::S) rep.checks.push_back(check_barrier_blowup(id, g));
  }
  for (ControllerId id : kTheoremControllers) rep.checks.push_back(check_jacobian(id, g, o.jacobian_tol));
  for (DesignFamily f : {DesignFamily::Passivity, DesignFamily::Forwarding, DesignFamily::Backstepping}) {
    rep.checks.push_back(check_gain_assignment(f, o.samples, o.seed + 104729));
  }
  for (const auto& c : check_appendix_bounds(o.bounds_step)) rep.checks.push_back(c);
  return rep;
}

}  // namespace unipark

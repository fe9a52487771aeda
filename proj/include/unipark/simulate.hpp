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

// Fixed-step RK4 integration of the closed loops in the polar or the
// Cartesian chart, with certificate logging and sweeps.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "unipark/control.hpp"
#include "unipark/dynamics.hpp"
#include "unipark/errors.hpp"
#include "unipark/lyapunov.hpp"
#include "unipark/state_space.hpp"

namespace unipark {

enum class Frame { Polar, Cartesian };

/// How a Cartesian run reads (delta, gamma) off the pose.
///  Wrapped: both angles in [-pi, pi).
///  Table:   delta in (0, 2 pi] straight from atan2, gamma = delta - theta
///           with the unwrapped heading; barrier axes are still wrapped.
///  Tracked: the 2 pi branch nearest the previous step, starting from the
///           initial polar state. Reproduces the polar-chart solution.
enum class AngleConvention { Wrapped, Table, Tracked };

enum class Termination { Converged, TMax, BarrierGuard, Numeric };

inline std::string_view to_string(Frame f) { return f == Frame::Polar ? "polar" : "cartesian"; }

inline Frame frame_from_string(std::string_view s) {
  if (s == "polar") return Frame::Polar;
  if (s == "cartesian") return Frame::Cartesian;
  throw ConfigError("unknown frame '" + std::string(s) + "'");
}

inline std::string_view to_string(AngleConvention c) {
  switch (c) {
    case AngleConvention::Wrapped: return "wrapped";
    case AngleConvention::Table: return "table";
    case AngleConvention::Tracked: return "tracked";
  }
  return "?";
}

inline AngleConvention angle_convention_from_string(std::string_view s) {
  if (s == "wrapped") return AngleConvention::Wrapped;
  if (s == "table") return AngleConvention::Table;
  if (s == "tracked") return AngleConvention::Tracked;
  throw ConfigError("unknown angle convention '" + std::string(s) + "'");
}

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::TMax: return "t_max";
    case Termination::BarrierGuard: return "barrier_guard";
    case Termination::Numeric: return "numeric";
  }
  return "?";
}

struct Scenario {
  ControllerId controller = ControllerId::Genova;
  Gains gains;
  std::optional<CartesianState> init_cart;
  std::optional<PolarState> init_polar;
  CartesianState target;
  Frame frame = Frame::Polar;
  AngleConvention convention = AngleConvention::Wrapped;
  double dt = 1e-3;
  double t_max = 100.0;
  double tol = 1e-4;             ///< converged once metric < tol
  double barrier_margin = 1e-9;  ///< guard trips at |angle| >= pi - margin
  CompositeKind composite = CompositeKind::Sum;
  CompositeOrder order = CompositeOrder::RhoFirst;
  std::size_t sample_every = 1;  ///< keep every n-th step (the last one always)
  double v_tolerance = 1e-9;     ///< allowed per-step rise of V, times max(1, V)
};

struct Sample {
  double t;
  CartesianState cart;
  PolarState polar;
  ControlInput u;
  double v;  ///< certificate value; NaN if not evaluable
  double metric;
};

/// Sign change of y between two steps; x is linearly interpolated.
struct Crossing {
  double t;
  double x;
};

struct Trajectory {
  std::vector<Sample> samples;
  Termination termination = Termination::TMax;
  std::string message;
  std::size_t steps = 0;
  double t_final = 0.0;
  double final_metric = 0.0;
  std::vector<Crossing> crossings;
  std::size_t v_violations = 0;  ///< steps where V rose beyond v_tolerance
  double v_max_increase = 0.0;   ///< largest V_{k+1} - V_k
  std::size_t v_nonfinite = 0;
  double path_length = 0.0;      ///< integral of |v|
  double steering_effort = 0.0;  ///< integral of omega^2
  std::optional<double> min_barrier_margin;
  double max_abs_delta = 0.0;
  double max_abs_gamma = 0.0;

  bool converged() const { return termination == Termination::Converged; }

  std::size_t front_crossings() const {
    return static_cast<std::size_t>(std::count_if(
        crossings.begin(), crossings.end(), [](const Crossing& c) { return c.x > 0.0; }));
  }
};

/// Polar coordinates of a pose under one of the angle conventions.
/// `reference` is the previous polar state, used by Tracked only.
inline PolarState polar_image(const CartesianState& c, const CartesianState& target,
                              AngleConvention conv, StateSpaceId ss,
                              const PolarState* reference = nullptr) {
  PolarState p = cartesian_to_polar(c, target);
  auto nearest = [](double a, double ref) { return a + kTwoPi * std::round((ref - a) / kTwoPi); };
  switch (conv) {
    case AngleConvention::Wrapped:
      return wrap_angles(p);
    case AngleConvention::Table:
      if (delta_bounded(ss)) p.delta = wrap_angle(p.delta);
      if (gamma_bounded(ss)) p.gamma = wrap_angle(p.gamma);
      return p;
    case AngleConvention::Tracked:
      if (reference == nullptr) return wrap_angles(p);
      p.delta = nearest(p.delta, reference->delta);
      p.gamma = nearest(p.gamma, reference->gamma);
      return p;
  }
  return p;
}

namespace detail {

using Vec3 = std::array<double, 3>;

template <class F>
Vec3 rk4(const F& f, const Vec3& s, double h) {
  auto axpy = [](const Vec3& x, const Vec3& d, double a) {
    return Vec3{x[0] + a * d[0], x[1] + a * d[1], x[2] + a * d[2]};
  };
  const Vec3 a = f(s);
  const Vec3 b = f(axpy(s, a, 0.5 * h));
  const Vec3 c = f(axpy(s, b, 0.5 * h));
  const Vec3 d = f(axpy(s, c, h));
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = s[i] + h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
  return out;
}

inline bool finite3(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

inline void validate(const Scenario& s) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw ConfigError("scenario: dt must be positive");
  if (!(s.t_max >= s.dt)) throw ConfigError("scenario: t_max must be at least dt");
  if (!(s.tol > 0.0)) throw ConfigError("scenario: tol must be positive");
  if (!(s.barrier_margin >= 0.0)) throw ConfigError("scenario: negative barrier margin");
  if (s.init_cart.has_value() == s.init_polar.has_value()) {
    throw ConfigError("scenario: give exactly one of a Cartesian or a polar initial state");
  }
  if (s.sample_every == 0) throw ConfigError("scenario: sample_every must be >= 1");
  try {
    validate_gains(s.controller, s.gains);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

/// Bookkeeping shared by both charts.
class Recorder {
 public:
  Recorder(const Scenario& s, Trajectory& tr)
      : s_(s), tr_(tr), clf_(make_clf(s.controller, s.gains, s.composite, s.order)),
        ss_(state_space_of(s.controller)) {}

  double certificate(const PolarState& p) const {
    try {
      return clf_.value(p);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

  double metric_of(const PolarState& p) const {
    try {
      return metric(p, ss_);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  /// Step k ended at time t in state (c, p) with input u. Returns the metric.
  double add(std::size_t k, double t, const CartesianState& c, const PolarState& p,
             const ControlInput& u, bool last) {
    const double v = certificate(p);
    const double m = metric_of(p);
    if (k > 0) {
      const double h = t - prev_.t;
      tr_.path_length += 0.5 * h * (std::abs(prev_.u.v) + std::abs(u.v));
      tr_.steering_effort += 0.5 * h * (prev_.u.omega * prev_.u.omega + u.omega * u.omega);
      if (std::isfinite(v) && std::isfinite(prev_.v)) {
        const double rise = v - prev_.v;
        tr_.v_max_increase = std::max(tr_.v_max_increase, rise);
        if (rise > s_.v_tolerance * std::max(1.0, prev_.v)) ++tr_.v_violations;
      } else {
        ++tr_.v_nonfinite;
      }
      const double y0 = prev_.cart.y - s_.target.y;
      const double y1 = c.y - s_.target.y;
      if ((y0 < 0.0 && y1 >= 0.0) || (y0 > 0.0 && y1 <= 0.0)) {
        const double a = y0 / (y0 - y1);
        const double x = prev_.cart.x + a * (c.x - prev_.cart.x) - s_.target.x;
        tr_.crossings.push_back({prev_.t + a * h, x});
      }
    }
    tr_.max_abs_delta = std::max(tr_.max_abs_delta, std::abs(p.delta));
    tr_.max_abs_gamma = std::max(tr_.max_abs_gamma, std::abs(p.gamma));
    if (auto bm = barrier_margin(p, ss_)) {
      tr_.min_barrier_margin =
          tr_.min_barrier_margin ? std::min(*tr_.min_barrier_margin, *bm) : *bm;
    }
    prev_ = Sample{t, c, p, u, v, m};
    if (k % s_.sample_every == 0 || last) tr_.samples.push_back(prev_);
    tr_.steps = k;
    tr_.t_final = t;
    tr_.final_metric = m;
    return m;
  }

  /// Makes sure the final state is among the samples.
  void flush() {
    if (tr_.samples.empty() || tr_.samples.back().t != prev_.t) tr_.samples.push_back(prev_);
  }

  bool guard_tripped(const PolarState& p) const {
    const double lim = kPi - s_.barrier_margin;
    if (delta_bounded(ss_) && !(std::abs(p.delta) < lim)) return true;
    if (gamma_bounded(ss_) && !(std::abs(p.gamma) < lim)) return true;
    return false;
  }

 private:
  const Scenario& s_;
  Trajectory& tr_;
  LyapunovFn clf_;
  StateSpaceId ss_;
  Sample prev_{};
};

inline std::size_t step_count(const Scenario& s) {
  return static_cast<std::size_t>(std::ceil(s.t_max / s.dt - 1e-9));
}

}  // namespace detail

/// Integrates the closed loop in (rho, delta, gamma).
inline Trajectory integrate_polar(const Scenario& s) {
  detail::validate(s);
  const StateSpaceId ss = state_space_of(s.controller);
  PolarState p0;
  if (s.init_polar) {
    p0 = *s.init_polar;
  } else {
    p0 = polar_image(*s.init_cart, s.target, s.convention, ss);
  }
  if (!(p0.rho >= 0.0) || !is_inside(ss, p0.delta, p0.gamma)) {
    throw ConfigError("scenario: initial state outside the controller's state space");
  }
  const Controller ctl(s.controller, s.gains);
  Trajectory tr;
  detail::Recorder rec(s, tr);

  auto field = [&](const detail::Vec3& x) {
    const PolarRate r = closed_loop_field(ctl, PolarState{x[0], x[1], x[2]});
    return detail::Vec3{r.rho, r.delta, r.gamma};
  };
  auto record = [&](std::size_t k, const detail::Vec3& x, bool last) {
    const PolarState p{x[0], x[1], x[2]};
    return rec.add(k, static_cast<double>(k) * s.dt, polar_to_cartesian(p, s.target), p,
                   ctl.control(p), last);
  };

  detail::Vec3 x{p0.rho, p0.delta, p0.gamma};
  if (record(0, x, false) < s.tol) {
    tr.termination = Termination::Converged;
    rec.flush();
    return tr;
  }
  const std::size_t n = detail::step_count(s);
  for (std::size_t k = 1; k <= n; ++k) {
    detail::Vec3 next;
    try {
      next = detail::rk4(field, x, s.dt);
    } catch (const BarrierDomainError& e) {
      tr.termination = Termination::BarrierGuard;
      tr.message = e.what();
      break;
    } catch (const DomainError& e) {
      tr.termination = Termination::Numeric;
      tr.message = e.what();
      break;
    }
    if (!detail::finite3(next)) {
      tr.termination = Termination::Numeric;
      tr.message = "non-finite state";
      break;
    }
    const PolarState pn{next[0], next[1], next[2]};
    if (rec.guard_tripped(pn)) {
      tr.termination = Termination::BarrierGuard;
      tr.message = "barrier guard";
      break;
    }
    x = next;
    if (record(k, x, k == n) < s.tol) {
      tr.termination = Termination::Converged;
      break;
    }
    if (k == n) tr.termination = Termination::TMax;
  }
  rec.flush();
  return tr;
}

/// Integrates the unicycle kinematics in (x, y, theta), reading the feedback
/// off the pose through s.convention at every RK4 stage.
inline Trajectory integrate_cartesian(const Scenario& s) {
  detail::validate(s);
  const StateSpaceId ss = state_space_of(s.controller);
  CartesianState c0;
  std::optional<PolarState> ref;
  if (s.init_cart) {
    c0 = *s.init_cart;
  } else {
    c0 = polar_to_cartesian(*s.init_polar, s.target);
    ref = *s.init_polar;
  }
  if (!(std::hypot(c0.x - s.target.x, c0.y - s.target.y) > 0.0)) {
    throw ConfigError("scenario: Cartesian integration needs a start away from the target");
  }
  const Controller ctl(s.controller, s.gains);
  Trajectory tr;
  detail::Recorder rec(s, tr);

  PolarState anchor = polar_image(c0, s.target, s.convention, ss, ref ? &*ref : nullptr);
  if (!is_inside(ss, anchor.delta, anchor.gamma)) {
    throw ConfigError("scenario: initial state outside the controller's state space");
  }
  auto image = [&](const CartesianState& c) {
    return polar_image(c, s.target, s.convention, ss, &anchor);
  };
  auto field = [&](const detail::Vec3& x) {
    const CartesianState c{x[0], x[1], x[2]};
    const ControlInput u = ctl.control(image(c));
    const CartesianRate r = unicycle_field(c, u);
    return detail::Vec3{r.x, r.y, r.theta};
  };

  detail::Vec3 x{c0.x, c0.y, c0.theta};
  if (rec.add(0, 0.0, c0, anchor, ctl.control(anchor), false) < s.tol) {
    tr.termination = Termination::Converged;
    rec.flush();
    return tr;
  }
  const std::size_t n = detail::step_count(s);
  for (std::size_t k = 1; k <= n; ++k) {
    detail::Vec3 next;
    PolarState pn;
    ControlInput un;
    try {
      next = detail::rk4(field, x, s.dt);
      if (!detail::finite3(next)) {
        tr.termination = Termination::Numeric;
        tr.message = "non-finite state";
        break;
      }
      const CartesianState cn{next[0], next[1], next[2]};
      if (!(std::hypot(cn.x - s.target.x, cn.y - s.target.y) > 0.0)) {
        // Landed exactly on the target position.
        tr.termination = Termination::Converged;
        break;
      }
      pn = image(cn);
      if (rec.guard_tripped(pn)) {
        tr.termination = Termination::BarrierGuard;
        tr.message = "barrier guard";
        break;
      }
      un = ctl.control(pn);
    } catch (const BarrierDomainError& e) {
      tr.termination = Termination::BarrierGuard;
      tr.message = e.what();
      break;
    } catch (const DomainError& e) {
      tr.termination = Termination::Numeric;
      tr.message = e.what();
      break;
    }
    x = next;
    anchor = pn;
    if (rec.add(k, static_cast<double>(k) * s.dt, {x[0], x[1], x[2]}, pn, un, k == n) < s.tol) {
      tr.termination = Termination::Converged;
      break;
    }
    if (k == n) tr.termination = Termination::TMax;
  }
  rec.flush();
  return tr;
}

inline Trajectory integrate(const Scenario& s) {
  return s.frame == Frame::Polar ? integrate_polar(s) : integrate_cartesian(s);
}

/// One row of a sweep summary.
struct SweepRow {
  std::size_t index = 0;
  std::optional<CartesianState> init_cart;
  std::optional<PolarState> init_polar;
  Termination termination = Termination::Numeric;
  std::string error;  ///< set when the run could not start
  double t_final = 0.0;
  double final_metric = 0.0;
  double path_length = 0.0;
  double steering_effort = 0.0;
  std::optional<double> min_barrier_margin;
  std::size_t v_violations = 0;
  double v_max_increase = 0.0;
  std::size_t crossings = 0;
  std::size_t front_crossings = 0;
  double max_abs_delta = 0.0;
  double max_abs_gamma = 0.0;
};

/// Initial states of a sweep; each entry replaces the base scenario's initial state.
struct InitialState {
  std::optional<CartesianState> cart;
  std::optional<PolarState> polar;
};

inline SweepRow summarize(std::size_t index, const InitialState& init, const Trajectory& tr) {
  SweepRow r;
  r.index = index;
  r.init_cart = init.cart;
  r.init_polar = init.polar;
  r.termination = tr.termination;
  r.error = tr.message;
  r.t_final = tr.t_final;
  r.final_metric = tr.final_metric;
  r.path_length = tr.path_length;
  r.steering_effort = tr.steering_effort;
  r.min_barrier_margin = tr.min_barrier_margin;
  r.v_violations = tr.v_violations;
  r.v_max_increase = tr.v_max_increase;
  r.crossings = tr.crossings.size();
  r.front_crossings = tr.front_crossings();
  r.max_abs_delta = tr.max_abs_delta;
  r.max_abs_gamma = tr.max_abs_gamma;
  return r;
}

inline Scenario with_initial(Scenario s, const InitialState& init) {
  s.init_cart = init.cart;
  s.init_polar = init.polar;
  return s;
}

/// Runs `base` from every grid point on up to `threads` workers (0 = hardware
/// concurrency). Rows come back in grid order; a failing point is recorded,
/// never thrown. `keep` optionally receives the full trajectories.
inline std::vector<SweepRow> sweep(const Scenario& base, const std::vector<InitialState>& grid,
                                   unsigned threads = 1,
                                   std::vector<Trajectory>* keep = nullptr) {
  std::vector<SweepRow> rows(grid.size());
  if (keep) keep->assign(grid.size(), Trajectory{});
  auto run = [&](std::size_t i) {
    try {
      Trajectory tr = integrate(with_initial(base, grid[i]));
      rows[i] = summarize(i, grid[i], tr);
      if (keep) (*keep)[i] = std::move(tr);
    } catch (const std::exception& e) {
      rows[i].index = i;
      rows[i].init_cart = grid[i].cart;
      rows[i].init_polar = grid[i].polar;
      rows[i].termination = Termination::Numeric;
      rows[i].error = e.what();
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, grid.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run(i);
    return rows;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < grid.size(); i += threads) run(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

/// Largest pose difference between two runs over the common sample times,
/// with headings compared modulo 2 pi.
inline double max_pose_difference(const Trajectory& a, const Trajectory& b, double t_end) {
  double worst = 0.0;
  std::size_t j = 0;
  for (const Sample& sa : a.samples) {
    if (sa.t > t_end + 1e-12) break;
    while (j < b.samples.size() && b.samples[j].t < sa.t - 1e-12) ++j;
    if (j >= b.samples.size()) break;
    const Sample& sb = b.samples[j];
    if (std::abs(sb.t - sa.t) > 1e-12) continue;
    const double dth = std::remainder(sa.cart.theta - sb.cart.theta, kTwoPi);
    worst = std::max({worst, std::abs(sa.cart.x - sb.cart.x), std::abs(sa.cart.y - sb.cart.y),
                      std::abs(dth)});
  }
  return worst;
}

}  // namespace unipark

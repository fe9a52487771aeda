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

// CSV, JSON and SVG output, and the JSON scenario format.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "unipark/linearization.hpp"
#include "unipark/simulate.hpp"
#include "unipark/verify.hpp"

namespace unipark {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string fmt_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// ---------------------------------------------------------------- CSV

inline void write_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x,y,theta,rho,delta,gamma,v,omega,V,metric\n";
  for (const Sample& s : tr.samples) {
    const double vals[] = {s.t,       s.cart.x,    s.cart.y,     s.cart.theta,
                           s.polar.rho, s.polar.delta, s.polar.gamma, s.u.v,
                           s.u.omega, s.v,         s.metric};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) os << ',';
      os << fmt_double(vals[i]);
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------- JSON

/// NaN and infinities are not JSON numbers; they become null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json gains_to_json(const Gains& g) {
  return json{{"k0", g.k0}, {"k1", g.k1}, {"k2", g.k2}, {"k3", g.k3}, {"k4", g.k4}};
}

inline std::string_view to_string(CompositeOrder o) {
  return o == CompositeOrder::RhoFirst ? "rho_first" : "v_first";
}

inline CompositeOrder composite_order_from_string(std::string_view s) {
  if (s == "rho_first") return CompositeOrder::RhoFirst;
  if (s == "v_first") return CompositeOrder::VFirst;
  throw ConfigError("unknown composite order '" + std::string(s) + "'");
}

inline json scenario_to_json(const Scenario& s) {
  json j{{"schema_version", kSchemaVersion},
         {"controller", to_string(s.controller)},
         {"gains", json::array({s.gains.k1, s.gains.k2, s.gains.k3, s.gains.k4})},
         {"target", json::array({s.target.x, s.target.y, s.target.theta})},
         {"frame", to_string(s.frame)},
         {"convention", to_string(s.convention)},
         {"dt", s.dt},
         {"t_max", s.t_max},
         {"tol", s.tol},
         {"barrier_margin", s.barrier_margin},
         {"composite", to_string(s.composite)},
         {"order", to_string(s.order)},
         {"sample_every", s.sample_every}};
  if (s.init_cart) j["init_cart"] = {s.init_cart->x, s.init_cart->y, s.init_cart->theta};
  if (s.init_polar) j["init_polar"] = {s.init_polar->rho, s.init_polar->delta, s.init_polar->gamma};
  return j;
}

namespace detail {

inline std::array<double, 3> triple(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(std::string(key) + ": expected an array of 3 numbers");
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(key) + ": expected numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

}  // namespace detail

/// Reads the fields present in `j` on top of `base`. Unknown keys are rejected.
inline Scenario scenario_from_json(const json& j, Scenario base = {}) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  static const char* known[] = {"schema_version", "controller", "gains",   "target",
                                "frame",          "convention", "dt",      "t_max",
                                "tol",            "barrier_margin", "composite", "order",
                                "sample_every",   "init_cart",  "init_polar"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return it.key() == k; }) == std::end(known)) {
      throw ConfigError("scenario: unknown key '" + it.key() + "'");
    }
  }
  try {
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kSchemaVersion) {
      throw ConfigError("scenario: unsupported schema_version");
    }
    if (j.contains("controller")) {
      base.controller = controller_from_string(j["controller"].get<std::string>());
    }
    if (j.contains("gains")) {
      const auto v = j["gains"].get<std::vector<double>>();
      base.gains = Gains::from_vector(v.data(), v.size());
    }
    if (j.contains("target")) {
      const auto t = detail::triple(j["target"], "target");
      base.target = {t[0], t[1], t[2]};
    }
    if (j.contains("frame")) base.frame = frame_from_string(j["frame"].get<std::string>());
    if (j.contains("convention")) {
      base.convention = angle_convention_from_string(j["convention"].get<std::string>());
    }
    if (j.contains("dt")) base.dt = j["dt"].get<double>();
    if (j.contains("t_max")) base.t_max = j["t_max"].get<double>();
    if (j.contains("tol")) base.tol = j["tol"].get<double>();
    if (j.contains("barrier_margin")) base.barrier_margin = j["barrier_margin"].get<double>();
    if (j.contains("composite")) {
      base.composite = composite_from_string(j["composite"].get<std::string>());
    }
    if (j.contains("order")) base.order = composite_order_from_string(j["order"].get<std::string>());
    if (j.contains("sample_every")) base.sample_every = j["sample_every"].get<std::size_t>();
    if (j.contains("init_cart") && j.contains("init_polar")) {
      throw ConfigError("scenario: init_cart and init_polar are exclusive");
    }
    if (j.contains("init_cart")) {
      const auto c = detail::triple(j["init_cart"], "init_cart");
      base.init_cart = CartesianState{c[0], c[1], c[2]};
      base.init_polar.reset();
    }
    if (j.contains("init_polar")) {
      const auto p = detail::triple(j["init_polar"], "init_polar");
      base.init_polar = PolarState{p[0], p[1], p[2]};
      base.init_cart.reset();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return base;
}

inline json trajectory_summary_json(const Trajectory& tr) {
  json crossings = json::array();
  for (const Crossing& c : tr.crossings) crossings.push_back({{"t", c.t}, {"x", c.x}});
  return json{{"termination", to_string(tr.termination)},
              {"message", tr.message},
              {"steps", tr.steps},
              {"t_final", tr.t_final},
              {"final_metric", num(tr.final_metric)},
              {"path_length", num(tr.path_length)},
              {"steering_effort", num(tr.steering_effort)},
              {"min_barrier_margin",
               tr.min_barrier_margin ? num(*tr.min_barrier_margin) : json(nullptr)},
              {"max_abs_delta", num(tr.max_abs_delta)},
              {"max_abs_gamma", num(tr.max_abs_gamma)},
              {"v_violations", tr.v_violations},
              {"v_max_increase", num(tr.v_max_increase)},
              {"v_nonfinite", tr.v_nonfinite},
              {"crossings", crossings},
              {"front_crossings", tr.front_crossings()}};
}

inline json trajectory_json(const Trajectory& tr, const Scenario& s) {
  json cols = json::object();
  const char* names[] = {"t", "x", "y", "theta", "rho", "delta", "gamma", "v", "omega", "V", "metric"};
  for (const char* n : names) cols[n] = json::array();
  for (const Sample& p : tr.samples) {
    cols["t"].push_back(p.t);
    cols["x"].push_back(p.cart.x);
    cols["y"].push_back(p.cart.y);
    cols["theta"].push_back(p.cart.theta);
    cols["rho"].push_back(p.polar.rho);
    cols["delta"].push_back(p.polar.delta);
    cols["gamma"].push_back(p.polar.gamma);
    cols["v"].push_back(num(p.u.v));
    cols["omega"].push_back(num(p.u.omega));
    cols["V"].push_back(num(p.v));
    cols["metric"].push_back(num(p.metric));
  }
  return json{{"schema_version", kSchemaVersion},
              {"kind", "trajectory"},
              {"scenario", scenario_to_json(s)},
              {"summary", trajectory_summary_json(tr)},
              {"samples", cols}};
}

inline json sweep_row_json(const SweepRow& r) {
  json j{{"index", r.index},
         {"termination", to_string(r.termination)},
         {"error", r.error},
         {"t_final", r.t_final},
         {"final_metric", num(r.final_metric)},
         {"path_length", num(r.path_length)},
         {"steering_effort", num(r.steering_effort)},
         {"min_barrier_margin", r.min_barrier_margin ? num(*r.min_barrier_margin) : json(nullptr)},
         {"v_violations", r.v_violations},
         {"v_max_increase", num(r.v_max_increase)},
         {"crossings", r.crossings},
         {"front_crossings", r.front_crossings},
         {"max_abs_delta", num(r.max_abs_delta)},
         {"max_abs_gamma", num(r.max_abs_gamma)}};
  if (r.init_cart) j["init_cart"] = {r.init_cart->x, r.init_cart->y, r.init_cart->theta};
  if (r.init_polar) j["init_polar"] = {r.init_polar->rho, r.init_polar->delta, r.init_polar->gamma};
  return j;
}

/// Aligned plain-text table of sweep rows.
inline std::string sweep_text(const std::string& controller, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %5s %-13s %9s %10s %9s %11s %10s %5s %5s\n",
                "controller", "idx", "termination", "t_final", "metric", "path", "effort",
                "min_margin", "Vviol", "front");
  os << line;
  for (const SweepRow& r : rows) {
    const std::string margin =
        r.min_barrier_margin ? fmt_double(*r.min_barrier_margin, "%.4g") : std::string("-");
    std::snprintf(line, sizeof line, "%-14s %5zu %-13s %9.3f %10.3g %9.4f %11.4f %10s %5zu %5zu\n",
                  controller.c_str(), r.index, std::string(to_string(r.termination)).c_str(),
                  r.t_final, r.final_metric, r.path_length, r.steering_effort, margin.c_str(),
                  r.v_violations, r.front_crossings);
    os << line;
  }
  return os.str();
}

inline json check_json(const CheckResult& c) {
  return json{{"name", c.name},     {"subject", c.subject}, {"passed", c.passed},
              {"worst", num(c.worst)}, {"limit", num(c.limit)}, {"samples", c.samples},
              {"detail", c.detail}};
}

inline json verify_json(const VerifyReport& rep, const Gains& g, const VerifyOptions& o) {
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back(check_json(c));
  return json{{"schema_version", kSchemaVersion},
              {"kind", "verify"},
              {"gains", gains_to_json(g)},
              {"seed", o.seed},
              {"samples", o.samples},
              {"all_passed", rep.all_passed()},
              {"checks", checks}};
}

inline json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------- SVG

struct SvgPath {
  std::string label;
  std::string color;
  const Trajectory* trajectory = nullptr;
};

struct SvgOptions {
  int width = 640;
  int height = 640;
  std::size_t heading_ticks = 12;  ///< per path
  std::string title;
};

namespace detail {

inline double nice_step(double span) {
  const double raw = span / 8.0;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * p >= raw) return m * p;
  }
  return 10.0 * p;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Self-contained SVG of (x, y) paths with heading ticks, start markers,
/// the target pose and a labelled grid.
inline std::string render_svg(const std::vector<SvgPath>& paths, const CartesianState& target,
                              const SvgOptions& o = {}) {
  double xmin = target.x - 0.5, xmax = target.x + 0.5;
  double ymin = target.y - 0.5, ymax = target.y + 0.5;
  for (const auto& p : paths) {
    for (const Sample& s : p.trajectory->samples) {
      if (!std::isfinite(s.cart.x) || !std::isfinite(s.cart.y)) continue;
      xmin = std::min(xmin, s.cart.x);
      xmax = std::max(xmax, s.cart.x);
      ymin = std::min(ymin, s.cart.y);
      ymax = std::max(ymax, s.cart.y);
    }
  }
  // Equal aspect ratio with a 5% pad.
  const double span = std::max(xmax - xmin, ymax - ymin) * 1.1;
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  xmin = cx - span / 2;
  ymin = cy - span / 2;
  const double margin = 50.0;
  const double plot = std::min(o.width, o.height) - 2.0 * margin;
  auto px = [&](double x) { return margin + (x - xmin) / span * plot; };
  auto py = [&](double y) { return margin + plot - (y - ymin) / span * plot; };
  auto f = [](double v) { return fmt_double(v, "%.2f"); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
     << o.height << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty()) {
    os << "<text x=\"" << o.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"14\">" << detail::xml_escape(o.title) << "</text>\n";
  }
  // Grid and axis scale.
  const double step = detail::nice_step(span);
  os << "<g stroke=\"#e0e0e0\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"10\" "
        "fill=\"#555\">\n";
  for (double g = std::ceil(xmin / step) * step; g <= xmin + span + 1e-12; g += step) {
    os << "<line x1=\"" << f(px(g)) << "\" y1=\"" << f(margin) << "\" x2=\"" << f(px(g))
       << "\" y2=\"" << f(margin + plot) << "\"/>";
    os << "<text stroke=\"none\" x=\"" << f(px(g)) << "\" y=\"" << f(margin + plot + 14)
       << "\" text-anchor=\"middle\">" << fmt_double(std::abs(g) < 1e-12 ? 0.0 : g, "%g")
       << "</text>\n";
  }
  for (double g = std::ceil(ymin / step) * step; g <= ymin + span + 1e-12; g += step) {
    os << "<line x1=\"" << f(margin) << "\" y1=\"" << f(py(g)) << "\" x2=\"" << f(margin + plot)
       << "\" y2=\"" << f(py(g)) << "\"/>";
    os << "<text stroke=\"none\" x=\"" << f(margin - 6) << "\" y=\"" << f(py(g) + 3)
       << "\" text-anchor=\"end\">" << fmt_double(std::abs(g) < 1e-12 ? 0.0 : g, "%g")
       << "</text>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << f(margin) << "\" y=\"" << f(margin) << "\" width=\"" << f(plot)
     << "\" height=\"" << f(plot) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<text x=\"" << f(margin + plot / 2) << "\" y=\"" << f(margin + plot + 32)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">x [m]</text>\n";
  os << "<text x=\"14\" y=\"" << f(margin + plot / 2) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
     << f(margin + plot / 2) << ")\">y [m]</text>\n";

  const double tick = 0.04 * span;
  for (const auto& p : paths) {
    const auto& ss = p.trajectory->samples;
    if (ss.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << p.color << "\" stroke-width=\"1.5\" points=\"";
    for (const Sample& s : ss) os << f(px(s.cart.x)) << ',' << f(py(s.cart.y)) << ' ';
    os << "\"><title>" << detail::xml_escape(p.label) << "</title></polyline>\n";
    os << "<circle cx=\"" << f(px(ss.front().cart.x)) << "\" cy=\"" << f(py(ss.front().cart.y))
       << "\" r=\"3\" fill=\"" << p.color << "\"/>\n";
    const std::size_t every = std::max<std::size_t>(1, ss.size() / std::max<std::size_t>(1, o.heading_ticks));
    for (std::size_t i = 0; i < ss.size(); i += every) {
      const Sample& s = ss[i];
      os << "<line stroke=\"" << p.color << "\" stroke-width=\"1\" x1=\"" << f(px(s.cart.x))
         << "\" y1=\"" << f(py(s.cart.y)) << "\" x2=\""
         << f(px(s.cart.x + tick * std::cos(s.cart.theta))) << "\" y2=\""
         << f(py(s.cart.y + tick * std::sin(s.cart.theta))) << "\"/>\n";
    }
  }
  // Target pose: a filled arrow along the target heading.
  {
    const double c = std::cos(target.theta), s = std::sin(target.theta);
    const double l = 1.6 * tick, w = 0.6 * tick;
    const double tipx = target.x + l * c, tipy = target.y + l * s;
    const double lx = target.x - w * s, ly = target.y + w * c;
    const double rx = target.x + w * s, ry = target.y - w * c;
    os << "<polygon fill=\"black\" points=\"" << f(px(tipx)) << ',' << f(py(tipy)) << ' '
       << f(px(lx)) << ',' << f(py(ly)) << ' ' << f(px(rx)) << ',' << f(py(ry))
       << "\"><title>target</title></polygon>\n";
    os << "<circle cx=\"" << f(px(target.x)) << "\" cy=\"" << f(py(target.y))
       << "\" r=\"3\" fill=\"black\"/>\n";
  }
  // Legend, one entry per distinct label.
  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& p : paths) {
    if (std::none_of(legend.begin(), legend.end(),
                     [&](const auto& e) { return e.first == p.label; })) {
      legend.emplace_back(p.label, p.color);
    }
  }
  double ly = margin + 14;
  for (const auto& [label, color] : legend) {
    os << "<line x1=\"" << f(margin + 8) << "\" y1=\"" << f(ly - 4) << "\" x2=\"" << f(margin + 28)
       << "\" y2=\"" << f(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << f(margin + 34) << "\" y=\"" << f(ly)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(label)
       << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace unipark

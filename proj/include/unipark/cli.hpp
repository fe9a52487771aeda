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

// The `unipark` command line: simulate, sweep, gains, verify.
//
// Exit codes: 0 success, 1 failed run or check, 2 usage or configuration error.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unipark/grids.hpp"
#include "unipark/io.hpp"
#include "unipark/linearization.hpp"
#include "unipark/simulate.hpp"
#include "unipark/verify.hpp"

namespace unipark {

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Typographic minus and plus-minus signs are accepted in numeric lists.
inline std::string normalize_signs(std::string s) {
  const std::pair<std::string, std::string> subst[] = {
      {"−", "-"}, {"±", "+-"}, {"–", "-"}};
  for (const auto& [from, to] : subst) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos)) {
      s.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
  }
  return out;
}

inline double parse_number(const std::string& tok, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + ": cannot parse '" + tok + "'");
  }
  if (used != tok.size()) throw ConfigError(std::string(what) + ": cannot parse '" + tok + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& tok : split(normalize_signs(s), ',')) out.push_back(parse_number(tok, what));
  return out;
}

inline std::array<double, 3> parse_triple(const std::string& s, const char* what) {
  const auto v = parse_list(s, what);
  if (v.size() != 3) throw ConfigError(std::string(what) + ": expected three numbers");
  return {v[0], v[1], v[2]};
}

/// Parses "a", "a+bi", "a-bi" or "a+-bi" (a conjugate pair).
inline std::vector<Complex> parse_complex_token(const std::string& raw) {
  std::string t;
  for (char c : raw) {
    if (c != ' ') t += c;
  }
  if (t.empty()) throw ConfigError("poles: empty entry");
  const char last = t.back();
  if (last != 'i' && last != 'j') return {Complex(parse_number(t, "poles"), 0.0)};
  t.pop_back();
  const auto pm = t.find("+-");
  if (pm != std::string::npos) {
    const double re = pm == 0 ? 0.0 : parse_number(t.substr(0, pm), "poles");
    const std::string im_s = t.substr(pm + 2);
    const double im = im_s.empty() ? 1.0 : parse_number(im_s, "poles");
    return {Complex(re, im), Complex(re, -im)};
  }
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t cut = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  if (cut == std::string::npos) {
    const double im = (t.empty() || t == "+") ? 1.0 : t == "-" ? -1.0 : parse_number(t, "poles");
    return {Complex(0.0, im)};
  }
  const double re = parse_number(t.substr(0, cut), "poles");
  const std::string im_s = t.substr(cut);
  const double im = im_s == "+" ? 1.0 : im_s == "-" ? -1.0 : parse_number(im_s, "poles");
  return {Complex(re, im)};
}

/// Three closed-loop eigenvalues, e.g. "-1,-0.5+-0.866i" or "-1,-2,-3".
inline PoleSpec parse_poles(const std::string& s) {
  std::vector<Complex> ev;
  for (const auto& tok : split(normalize_signs(s), ',')) {
    for (const auto& z : parse_complex_token(tok)) ev.push_back(z);
  }
  if (ev.size() != 3) throw ConfigError("poles: expected three eigenvalues");
  try {
    return PoleSpec::from_eigenvalues(ev[0], ev[1], ev[2]);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

inline Gains parse_gains(const std::string& s) {
  const auto v = parse_list(s, "gains");
  return Gains::from_vector(v.data(), v.size());
}

struct Formats {
  bool csv = false;
  bool json = false;
  bool svg = false;
};

inline Formats parse_formats(const std::string& s) {
  Formats f;
  for (const auto& tok : split(s, ',')) {
    if (tok == "csv") f.csv = true;
    else if (tok == "json") f.json = true;
    else if (tok == "svg") f.svg = true;
    else throw ConfigError("format: unknown '" + tok + "' (csv, json, svg)");
  }
  if (!f.csv && !f.json && !f.svg) throw ConfigError("format: empty");
  return f;
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << content;
}

/// UNIPARK_OUT wins over --out.
inline std::filesystem::path output_dir(const std::string& flag) {
  if (const char* env = std::getenv("UNIPARK_OUT"); env != nullptr && *env != '\0') return env;
  return flag;
}

/// Scenario flags shared by simulate and sweep.
struct ScenarioFlags {
  std::string scenario_file;
  std::string controller;
  std::string gains;
  std::string init_cart;
  std::string init_polar;
  std::string frame;
  std::string convention;
  std::string composite;
  std::string order;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<double> tol;
  std::optional<double> margin;
  std::optional<std::size_t> sample_every;

  void attach(CLI::App* app, bool with_init) {
    app->add_option("--scenario", scenario_file, "JSON scenario file; flags override its fields");
    app->add_option("--controller", controller,
                    "genova, bolsa, bopa, bagal, glofo, bofo, globa, globa-interp, globa-cons, "
                    "barfli, libac");
    app->add_option("--gains", gains, "k1,k2,k3[,k4]");
    if (with_init) {
      app->add_option("--init-cart", init_cart, "initial pose x,y,theta");
      app->add_option("--init-polar", init_polar, "initial polar state rho,delta,gamma");
    }
    app->add_option("--frame", frame, "polar or cartesian");
    app->add_option("--convention", convention,
                    "angle reading in the Cartesian frame: wrapped, table, tracked");
    app->add_option("--dt", dt, "RK4 step [s]");
    app->add_option("--t-max", t_max, "horizon [s]");
    app->add_option("--tol", tol, "convergence threshold on the metric");
    app->add_option("--margin", margin, "barrier guard margin [rad]");
    app->add_option("--composite", composite,
                    "sum, log-sum, exp-sum, exp-product, bilinear, cosh-sum, sqrt-sum");
    app->add_option("--order", order, "rho_first or v_first");
    app->add_option("--sample-every", sample_every, "keep every n-th step in the output");
  }

  Scenario build(bool require_controller) const {
    Scenario s;
    bool have_controller = false;
    if (!scenario_file.empty()) {
      std::ifstream is(scenario_file);
      if (!is) throw ConfigError("cannot open scenario file " + scenario_file);
      json j;
      try {
        j = json::parse(is);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario file: ") + e.what());
      }
      s = scenario_from_json(j);
      have_controller = j.contains("controller");
    }
    if (!controller.empty()) {
      s.controller = controller_from_string(controller);
      have_controller = true;
    }
    if (require_controller && !have_controller) throw ConfigError("--controller is required");
    if (!gains.empty()) s.gains = parse_gains(gains);
    if (!init_cart.empty() && !init_polar.empty()) {
      throw ConfigError("--init-cart and --init-polar are exclusive");
    }
    if (!init_cart.empty()) {
      const auto c = parse_triple(init_cart, "init-cart");
      s.init_cart = CartesianState{c[0], c[1], c[2]};
      s.init_polar.reset();
    }
    if (!init_polar.empty()) {
      const auto p = parse_triple(init_polar, "init-polar");
      s.init_polar = PolarState{p[0], p[1], p[2]};
      s.init_cart.reset();
    }
    if (!frame.empty()) s.frame = frame_from_string(frame);
    if (!convention.empty()) s.convention = angle_convention_from_string(convention);
    if (!composite.empty()) s.composite = composite_from_string(composite);
    if (!order.empty()) s.order = composite_order_from_string(order);
    if (dt) s.dt = *dt;
    if (t_max) s.t_max = *t_max;
    if (tol) s.tol = *tol;
    if (margin) s.barrier_margin = *margin;
    if (sample_every) s.sample_every = *sample_every;
    try {
      validate_gains(s.controller, s.gains);
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
    return s;
  }
};

inline const char* path_color(std::size_t i) {
  static const char* palette[] = {"#d62728", "#1f77b4", "#17becf", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
  return palette[i % std::size(palette)];
}

inline int cmd_simulate(const ScenarioFlags& flags, const std::string& out_flag,
                        const std::string& format, std::ostream& out) {
  Scenario s = flags.build(true);
  if (!s.init_cart && !s.init_polar) throw ConfigError("--init-cart or --init-polar is required");
  const Formats f = parse_formats(format);
  const Trajectory tr = integrate(s);
  const auto dir = output_dir(out_flag);
  std::filesystem::create_directories(dir);
  if (f.csv) {
    std::ostringstream os;
    write_csv(os, tr);
    write_file(dir / "trajectory.csv", os.str());
  }
  if (f.json) write_file(dir / "trajectory.json", trajectory_json(tr, s).dump(1) + "\n");
  if (f.svg) {
    SvgOptions o;
    o.title = std::string(to_string(s.controller));
    write_file(dir / "trajectory.svg",
               render_svg({{std::string(to_string(s.controller)), path_color(0), &tr}}, s.target, o));
  }
  json summary = trajectory_summary_json(tr);
  summary.erase("crossings");
  out << json{{"schema_version", kSchemaVersion},
              {"kind", "simulate"},
              {"controller", to_string(s.controller)},
              {"output", dir.string()},
              {"summary", summary}}
             .dump()
      << "\n";
  const bool failed =
      tr.termination == Termination::BarrierGuard || tr.termination == Termination::Numeric;
  return failed ? kExitFailure : kExitOk;
}

struct SweepFlags {
  std::string controllers;
  std::string grid_file;
  std::string preset;
  std::size_t random = 0;
  double radius = 10.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

inline std::vector<InitialState> grid_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("grid file: expected an array");
  std::vector<InitialState> out;
  for (const auto& e : j) {
    if (!e.is_object()) throw ConfigError("grid file: entries must be objects");
    InitialState s;
    if (e.contains("cart")) {
      const auto c = detail::triple(e["cart"], "cart");
      s.cart = CartesianState{c[0], c[1], c[2]};
    } else if (e.contains("polar")) {
      const auto p = detail::triple(e["polar"], "polar");
      s.polar = PolarState{p[0], p[1], p[2]};
    } else {
      throw ConfigError("grid file: each entry needs 'cart' or 'polar'");
    }
    out.push_back(s);
  }
  return out;
}

inline int cmd_sweep(const ScenarioFlags& flags, const SweepFlags& sf, const std::string& out_flag,
                     std::ostream& out) {
  std::vector<ControllerId> ids;
  if (!sf.controllers.empty()) {
    for (const auto& tok : split(sf.controllers, ',')) ids.push_back(controller_from_string(tok));
  }
  Scenario base = flags.build(ids.empty());
  if (ids.empty()) ids.push_back(base.controller);

  const int sources = (!sf.grid_file.empty()) + (!sf.preset.empty()) + (sf.random > 0);
  if (sources != 1) throw ConfigError("give exactly one of --grid, --preset, --random");
  const auto dir = output_dir(out_flag);
  std::filesystem::create_directories(dir);

  json runs = json::array();
  std::string text;
  std::vector<std::vector<Trajectory>> kept(ids.size());
  std::vector<SvgPath> paths;
  bool any_failed = false;
  for (std::size_t c = 0; c < ids.size(); ++c) {
    Scenario s = base;
    s.controller = ids[c];
    validate_gains(s.controller, s.gains);
    std::vector<InitialState> grid;
    if (!sf.grid_file.empty()) {
      std::ifstream is(sf.grid_file);
      if (!is) throw ConfigError("cannot open grid file " + sf.grid_file);
      try {
        grid = grid_from_json(json::parse(is));
      } catch (const json::exception& e) {
        throw ConfigError(std::string("grid file: ") + e.what());
      }
    } else if (!sf.preset.empty()) {
      grid = preset_grid(sf.preset);
    } else {
      grid = random_metric_grid(state_space_of(s.controller), sf.random, sf.seed, sf.radius);
    }
    if (grid.empty()) throw ConfigError("empty grid");
    const auto rows = sweep(s, grid, sf.threads, &kept[c]);
    json jr = json::array();
    for (const auto& r : rows) {
      jr.push_back(sweep_row_json(r));
      any_failed |= r.termination == Termination::Numeric ||
                    r.termination == Termination::BarrierGuard;
    }
    runs.push_back({{"controller", to_string(s.controller)},
                    {"scenario", scenario_to_json(s)},
                    {"rows", jr}});
    text += sweep_text(std::string(to_string(s.controller)), rows);
    for (const auto& tr : kept[c]) {
      paths.push_back({std::string(to_string(s.controller)), path_color(c), &tr});
    }
  }
  write_file(dir / "sweep.json",
             json{{"schema_version", kSchemaVersion}, {"kind", "sweep"}, {"runs", runs}}.dump(1) +
                 "\n");
  write_file(dir / "sweep.txt", text);
  SvgOptions o;
  o.heading_ticks = 6;
  write_file(dir / "overlay.svg", render_svg(paths, base.target, o));
  out << text;
  return any_failed ? kExitFailure : kExitOk;
}

struct GainsFlags {
  std::string family;
  std::string poles;
  std::optional<double> epsilon;
  bool strict = false;
};

inline int cmd_gains(const GainsFlags& gf, const std::string& out_flag, std::ostream& out,
                     std::ostream& err) {
  if (gf.family.empty() || gf.poles.empty()) throw ConfigError("--family and --poles are required");
  const DesignFamily fam = design_family_from_string(gf.family);
  const PoleSpec ps = parse_poles(gf.poles);
  std::vector<Gains> gs;
  try {
    if (fam == DesignFamily::Passivity) gs.push_back(assign_passivity(ps, gf.strict));
    if (fam == DesignFamily::Forwarding) gs = assign_forwarding(ps);
    if (fam == DesignFamily::Backstepping) gs.push_back(assign_backstepping(ps, gf.epsilon));
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitFailure;
  }
  json sols = json::array();
  for (const Gains& g : gs) {
    const Matrix3 j = jacobian(fam, g);
    json ev = json::array();
    for (const auto& z : closed_loop_eigenvalues(j)) ev.push_back(complex_json(z));
    json k = json{{"k1", g.k1}, {"k2", g.k2}, {"k3", g.k3}};
    if (fam == DesignFamily::Backstepping) k["k4"] = g.k4;
    sols.push_back({{"gains", k},
                    {"eigenvalues", ev},
                    {"eigenvalue_error", eigenvalue_error(j, ps)},
                    {"strict", g.strict()}});
  }
  json report{{"schema_version", kSchemaVersion},
              {"kind", "gains"},
              {"family", to_string(fam)},
              {"poles", json::array({complex_json(Complex(-ps.p1, 0.0)), complex_json(-ps.p2),
                                     complex_json(-ps.p3)})},
              {"solutions", sols}};
  if (fam == DesignFamily::Backstepping) {
    report["epsilon"] = gf.epsilon.value_or(default_backstepping_epsilon(ps));
  }
  if (!out_flag.empty() || std::getenv("UNIPARK_OUT") != nullptr) {
    const auto dir = output_dir(out_flag);
    std::filesystem::create_directories(dir);
    write_file(dir / "gains.json", report.dump(1) + "\n");
  }
  out << report.dump(1) << "\n";
  return kExitOk;
}

struct VerifyFlags {
  std::string gains;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
};

inline int cmd_verify(const VerifyFlags& vf, const std::string& out_flag, std::ostream& out,
                      std::ostream& err) {
  Gains g;
  if (!vf.gains.empty()) g = parse_gains(vf.gains);
  for (ControllerId id : kAllControllers) {
    try {
      validate_gains(id, g);
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
  }
  VerifyOptions o;
  o.seed = vf.seed;
  o.samples = vf.samples;
  const VerifyReport rep = run_verification(g, o);
  const json j = verify_json(rep, g, o);
  if (!out_flag.empty() || std::getenv("UNIPARK_OUT") != nullptr) {
    const auto dir = output_dir(out_flag);
    std::filesystem::create_directories(dir);
    write_file(dir / "verify.json", j.dump(1) + "\n");
  }
  out << j.dump(1) << "\n";
  if (!rep.all_passed()) {
    for (const auto& c : rep.checks) {
      if (!c.passed) err << "FAILED " << check_json(c).dump() << "\n";
    }
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace cli

/// Entry point of the command line tool.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"unicycle parking controllers: simulate, sweep, assign gains, verify certificates",
               "unipark"};
  app.require_subcommand(1);

  cli::ScenarioFlags sim_flags;
  std::string sim_out = "out";
  std::string sim_format = "csv,json,svg";
  auto* sim = app.add_subcommand("simulate", "integrate one closed-loop scenario");
  sim_flags.attach(sim, true);
  sim->add_option("--out", sim_out, "output directory (UNIPARK_OUT overrides)");
  sim->add_option("--format", sim_format, "comma list of csv, json, svg");

  cli::ScenarioFlags sw_flags;
  cli::SweepFlags sw;
  std::string sw_out = "out";
  auto* swc = app.add_subcommand("sweep", "integrate a grid of initial states");
  sw_flags.attach(swc, false);
  swc->add_option("--controllers", sw.controllers, "comma list; overlays several laws");
  swc->add_option("--grid", sw.grid_file, "JSON array of {\"cart\": [x,y,theta]} or {\"polar\": [...]}");
  swc->add_option("--preset", sw.preset, "ring, front or box");
  swc->add_option("--random", sw.random, "number of seeded random states with metric <= --radius");
  swc->add_option("--radius", sw.radius, "metric bound for --random");
  swc->add_option("--seed", sw.seed, "seed for --random");
  swc->add_option("--threads", sw.threads, "worker threads (0 = all cores)");
  swc->add_option("--out", sw_out, "output directory (UNIPARK_OUT overrides)");

  cli::GainsFlags gf;
  std::string gains_out;
  auto* gc = app.add_subcommand("gains", "assign gains from closed-loop poles");
  gc->add_option("--family", gf.family, "passivity, forwarding or backstepping");
  gc->add_option("--poles", gf.poles, "three eigenvalues, e.g. \"-1,-0.5+-0.866i\"");
  gc->add_option("--epsilon", gf.epsilon, "backstepping margin in (0, Re p2)");
  gc->add_flag("--strict", gf.strict, "passivity: require k1 k3 >= k2^2");
  gc->add_option("--out", gains_out, "also write gains.json here");

  cli::VerifyFlags vf;
  std::string verify_out;
  auto* vc = app.add_subcommand("verify", "run the certificate checks");
  vc->add_option("--gains", vf.gains, "k1,k2,k3[,k4] (default all ones)");
  vc->add_option("--seed", vf.seed, "sampling seed");
  vc->add_option("--samples", vf.samples, "samples per family");
  vc->add_option("--out", verify_out, "also write verify.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return cli::kExitOk;
    }
    err << "usage error: " << e.what() << "\n" << "run 'unipark --help' for usage\n";
    return cli::kExitUsage;
  }

  try {
    if (*sim) return cli::cmd_simulate(sim_flags, sim_out, sim_format, out);
    if (*swc) return cli::cmd_sweep(sw_flags, sw, sw_out, out);
    if (*gc) return cli::cmd_gains(gf, gains_out, out, err);
    if (*vc) return cli::cmd_verify(vf, verify_out, out, err);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const ContractViolation& e) {
    err << "usage error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return cli::kExitFailure;
  }
  return cli::kExitUsage;
}

}  // namespace unipark

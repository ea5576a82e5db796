// Command-line front end: angle diagram, shock polar table, single solves,
// continuation sweeps and archive verification.
//
// Exit codes: 0 ok, 2 invalid input, 3 no convergence, 4 admissibility
// failure, 5 attached shock.

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rrefl/rrefl.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace rrefl;

namespace {

enum Exit { kOk = 0, kInput = 2, kNoConvergence = 3, kReportFailed = 4, kAttached = 5 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AttachedShockDetected:
      return kAttached;
    case ErrorKind::NoConvergence:
    case ErrorKind::EllipticityLost:
    case ErrorKind::GraphPropertyLost:
    case ErrorKind::FoldedMesh:
    case ErrorKind::VacuumReached:
    case ErrorKind::BracketingFailure:
    case ErrorKind::RootSeparationFailure:
      return kNoConvergence;
    default:
      return kInput;
  }
}

double deg2rad(double d) { return std::abs(d - 90.0) < 1e-12 ? kHalfPi : d * std::numbers::pi / 180.0; }
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

struct RunConfig {
  double rho0 = 1.0;
  double rho1 = 2.0;
  double gamma = 1.4;
  std::optional<double> theta_deg;
  std::string theta_grid;
  int n1 = 65;
  int n2 = 65;
  double step_deg = 1.0;
  int polar_points = 200;
  std::string out = "rrefl-out";
  unsigned seed = 0;
  IterationParams iter;

  ordered_json to_json() const {
    ordered_json j;
    j["rho0"] = rho0;
    j["rho1"] = rho1;
    j["gamma"] = gamma;
    j["theta"] = theta_deg ? ordered_json(*theta_deg) : ordered_json();
    j["theta_grid"] = theta_grid;
    j["n1"] = n1;
    j["n2"] = n2;
    j["step"] = step_deg;
    j["polar_points"] = polar_points;
    j["out"] = out;
    j["seed"] = seed;
    j["iteration"] = rrefl::to_json(iter);
    return j;
  }
};

/// Settings from a JSON file (same keys as RunConfig::to_json).
void load_config_file(const std::string& path, RunConfig& rc) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidParameter, "cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    rc.rho0 = j.value("rho0", rc.rho0);
    rc.rho1 = j.value("rho1", rc.rho1);
    rc.gamma = j.value("gamma", rc.gamma);
    if (j.contains("theta") && !j["theta"].is_null()) rc.theta_deg = j["theta"].get<double>();
    rc.theta_grid = j.value("theta_grid", rc.theta_grid);
    rc.n1 = j.value("n1", rc.n1);
    rc.n2 = j.value("n2", rc.n2);
    rc.step_deg = j.value("step", rc.step_deg);
    rc.polar_points = j.value("polar_points", rc.polar_points);
    rc.out = j.value("out", rc.out);
    rc.seed = j.value("seed", rc.seed);
    if (j.contains("iteration")) rc.iter = iteration_params_from_json(j["iteration"], rc.iter);
    if (j.contains("sigma")) rc.iter.sigma = j["sigma"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidParameter, "config file " + path + ": " + e.what());
  }
}

/// "90:85:0.5" (start:stop:step) or "90,89.5,89".
std::vector<double> parse_grid_deg(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  const auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidParameter, "bad angle grid entry '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) fail(ErrorKind::InvalidParameter, "angle grid range must be start:stop:step");
    const double a = num(parts[0]), b = num(parts[1]), h = std::abs(num(parts[2]));
    if (!(h > 0.0)) fail(ErrorKind::InvalidParameter, "angle grid step must be positive");
    const double dir = b < a ? -1.0 : 1.0;
    const int n = static_cast<int>(std::floor(std::abs(b - a) / h + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(a + dir * k * h);
    return out;
  }
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(num(p));
  return out;
}

GasParams gas(const RunConfig& rc) { return GasParams::make(rc.rho0, rc.rho1, rc.gamma); }

void validate(const RunConfig& rc) {
  gas(rc);
  rrefl::validate(rc.iter);
  if (rc.n1 < 5 || rc.n2 < 5) fail(ErrorKind::InvalidParameter, "grid sizes must be at least 5");
  if (!(rc.step_deg > 0.0)) fail(ErrorKind::InvalidParameter, "continuation step must be positive");
}

void write_text(const fs::path& p, const std::string& text) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::ArchiveError, "cannot write " + p.string());
  out << text;
}

int cmd_angles(const RunConfig& rc) {
  const GasParams params = gas(rc);
  const AngleDiagram d = angle_diagram(params);
  ordered_json j;
  j["theta_detach_deg"] = rad2deg(d.theta_d);
  j["theta_sonic_deg"] = rad2deg(d.theta_s);
  j["rho_critical"] = std::isfinite(d.rho_c) ? ordered_json(d.rho_c) : ordered_json("inf");
  j["attachment_possible"] = d.attachment_possible;
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  write_text(fs::path(rc.out) / "angles.json", text);
  return kOk;
}

int cmd_polar(const RunConfig& rc) {
  const GasParams params = gas(rc);
  std::vector<double> grid = parse_grid_deg(rc.theta_grid);
  if (grid.empty()) {
    if (rc.polar_points < 2) fail(ErrorKind::InvalidParameter, "polar needs at least 2 points");
    for (int k = 0; k < rc.polar_points; ++k) grid.push_back(45.0 + 45.0 * k / (rc.polar_points - 1));
  }
  std::string csv = "theta_w_deg,u2_weak,v2_weak,rho2_weak,mach_p0_weak,u2_strong,v2_strong,rho2_strong,status\n";
  const std::string nan = "nan";
  for (double deg : grid) {
    if (!(deg > 0.0 && deg <= 90.0)) fail(ErrorKind::InvalidParameter, "polar angles must lie in (0, 90]");
    std::string row = fmt17(deg) + ',';
    try {
      const State2Pair pair = state2_solve(params, deg2rad(deg));
      row += fmt17(pair.weak.u) + ',' + fmt17(pair.weak.v) + ',' + fmt17(pair.weak.rho) + ',' + fmt17(pair.mach_p0_weak) + ',';
      if (pair.strong) {
        row += fmt17(pair.strong->u) + ',' + fmt17(pair.strong->v) + ',' + fmt17(pair.strong->rho);
      } else {
        row += nan + ',' + nan + ',' + nan;
      }
      row += ",attached";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DetachedWedgeAngle) throw;
      for (int k = 0; k < 7; ++k) row += nan + ',';
      row += "detached";
    }
    csv += row + '\n';
  }
  write_text(fs::path(rc.out) / "polar.csv", csv);
  spdlog::info("wrote {} rows to {}", grid.size(), (fs::path(rc.out) / "polar.csv").string());
  return kOk;
}

/// Archive plus report for one solution; returns the report verdict.
bool archive_and_report(const fs::path& dir, const SolutionField& sol, const RunConfig& rc, bool print) {
  write_archive(dir, sol, rc.to_json());
  const AdmissibilityReport rep = full_report(sol);
  write_text(dir / "report.json", to_json(rep).dump(2) + "\n");
  if (print) print_table(std::cout, rep);
  if (sol.config.normal()) spdlog::info("flat shock at 90 degrees: flatness checked instead of strict convexity");
  return rep.pass;
}

int cmd_solve(const RunConfig& rc, const std::string& init_dir) {
  validate(rc);
  if (!rc.theta_deg) fail(ErrorKind::InvalidParameter, "solve needs --theta");
  const GasParams params = gas(rc);
  const double theta = deg2rad(*rc.theta_deg);
  if (!(theta > 0.0 && theta <= kHalfPi)) fail(ErrorKind::InvalidParameter, "theta must lie in (0, 90] degrees");
  const OuterObserver log_outer = [](const OuterRecord& r) {
    spdlog::debug("outer {:3d}  movement {:.3e}  residual {:.3e}", r.iteration, r.shock_movement, r.interior_residual);
  };
  SolutionField sol;
  if (!init_dir.empty()) {
    const LoadedArchive init = read_archive(init_dir);
    for (const auto& w : init.warnings) spdlog::warn("{}: {}", init_dir, w);
    sol = fixed_point_solve(params, theta, rc.iter, init.solution, rc.n1, rc.n2, log_outer);
  } else {
    sol = solve_from_normal(params, theta, rc.iter, rc.n1, rc.n2, deg2rad(rc.step_deg));
  }
  spdlog::info("converged at {:.6g} deg after {} outer iterations", rad2deg(sol.theta_w()), sol.residual_history.size());
  const bool pass = archive_and_report(rc.out, sol, rc, true);
  return pass ? kOk : kReportFailed;
}

int cmd_sweep(const RunConfig& rc) {
  validate(rc);
  const GasParams params = gas(rc);
  const std::vector<double> grid_deg = parse_grid_deg(rc.theta_grid);
  if (grid_deg.empty()) fail(ErrorKind::InvalidParameter, "empty angle grid");
  std::vector<double> grid;
  for (double d : grid_deg) grid.push_back(deg2rad(d));
  std::vector<bool> verdicts;
  const auto member_dir = [&](double theta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "theta_%08.4f", rad2deg(theta));
    return fs::path(rc.out) / buf;
  };
  const MemberObserver observer = [&](const SolutionField& s) {
    const bool ok = archive_and_report(member_dir(s.theta_w()), s, rc, false);
    verdicts.push_back(ok);
    spdlog::info("{:9.4f} deg  outer {:3d}  report {}", rad2deg(s.theta_w()), s.residual_history.size(), ok ? "pass" : "fail");
  };
  const SweepResult res = continuation_sweep(params, grid, rc.iter, rc.n1, rc.n2, observer);
  std::string csv = "theta_w_deg,status,distance_to_previous,report\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::string row = fmt17(grid_deg[k]) + ',';
    if (k < res.family.size()) {
      row += "converged,";
      row += (k == 0 ? std::string("nan") : fmt17(res.distances[k - 1])) + ',';
      row += verdicts[k] ? "pass" : "fail";
    } else if (k == res.family.size() && res.stop) {
      row += std::string(to_string(*res.stop)) + ",nan,none";
    } else {
      row += "skipped,nan,none";
    }
    csv += row + '\n';
  }
  write_text(fs::path(rc.out) / "family.csv", csv);
  if (res.stop) {
    std::cout << "sweep stopped at " << grid_deg[res.family.size()] << " deg: " << res.message << '\n';
    return exit_code(*res.stop);
  }
  std::cout << "sweep complete: " << res.family.size() << " members\n";
  for (bool v : verdicts) {
    if (!v) return kReportFailed;
  }
  return kOk;
}

int cmd_verify(const std::string& path, const std::string& report_out) {
  if (!fs::exists(fs::path(path) / "field.csv") || !fs::exists(fs::path(path) / "meta.json") ||
      !fs::exists(fs::path(path) / "shock.csv")) {
    fail(ErrorKind::ArchiveError, "incomplete archive at " + path);
  }
  const LoadedArchive a = read_archive(path);
  for (const auto& w : a.warnings) spdlog::warn("{}: {}", path, w);
  const AdmissibilityReport rep = full_report(a.solution);
  print_table(std::cout, rep);
  if (!report_out.empty()) write_text(report_out, to_json(rep).dump(2) + "\n");
  if (const CheckRecord* f = rep.first_failure()) {
    std::cout << "first failure: " << f->name;
    if (f->location) std::cout << " at (" << f->location->x << ", " << f->location->y << ")";
    std::cout << '\n';
    return kReportFailed;
  }
  return kOk;
}

}  // namespace

/// Value of --config in argv, if any; the file is applied before the flags.
std::string find_config_arg(int argc, char** argv) {
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--config" && k + 1 < argc) return argv[k + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

int main(int argc, char** argv) {
  CLI::App app{"Regular shock reflection: free-boundary solver and admissibility verifier"};
  app.require_subcommand(1);
  RunConfig rc;
  std::string config_file, log_level = "info", init_dir, report_out, verify_path;

  const auto common = [&](CLI::App* c) {
    c->add_option("--config", config_file, "JSON run configuration; explicit flags override it");
    c->add_option("--rho0", rc.rho0, "density of state (0)");
    c->add_option("--rho1", rc.rho1, "density of state (1)");
    c->add_option("--gamma", rc.gamma, "adiabatic exponent");
    c->add_option("--theta", rc.theta_deg, "wedge angle in degrees");
    c->add_option("--theta-grid", rc.theta_grid, "angles in degrees: start:stop:step or a comma list");
    c->add_option("--n1", rc.n1, "grid points from shock to wedge");
    c->add_option("--n2", rc.n2, "grid points from sonic side to axis");
    c->add_option("--sigma", rc.iter.sigma, "width of the near-sonic band of the regime classification");
    c->add_option("--out", rc.out, "output directory");
    c->add_option("--seed", rc.seed, "seed recorded with the run");
    c->add_option("--log-level", log_level, "trace, debug, info, warn, error or off");
  };
  CLI::App* angles = app.add_subcommand("angles", "detachment and sonic angles, critical density");
  CLI::App* polar = app.add_subcommand("polar", "weak and strong reflected states over an angle grid");
  CLI::App* solve = app.add_subcommand("solve", "solve at one wedge angle and certify the result");
  CLI::App* sweep = app.add_subcommand("sweep", "continuation from 90 degrees down an angle grid");
  CLI::App* verify = app.add_subcommand("verify", "recompute the admissibility report of an archive");
  for (CLI::App* c : {angles, polar, solve, sweep}) common(c);
  polar->add_option("--points", rc.polar_points, "number of angles in the default grid");
  solve->add_option("--init", init_dir, "archive to warm-start from");
  for (CLI::App* c : {solve, sweep}) {
    c->add_option("--step", rc.step_deg, "largest continuation step in degrees");
    c->add_option("--relax", rc.iter.relax, "under-relaxation of the shock update");
    c->add_option("--tol", rc.iter.tol_fixed_point, "fixed-point tolerance on the shock movement and field change");
    c->add_option("--cutoff-width", rc.iter.cutoff_width, "cutoff band width as a fraction of c2");
    c->add_option("--max-outer", rc.iter.max_outer, "outer iteration limit");
  }
  verify->add_option("path", verify_path, "archive directory")->required();
  verify->add_option("--report", report_out, "write the JSON report here");
  verify->add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  try {
    const std::string cfg = find_config_arg(argc, argv);
    if (!cfg.empty()) load_config_file(cfg, rc);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.kind());
  }
  spdlog::set_default_logger(spdlog::stderr_logger_mt("rrefl"));
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (cmd == angles) return cmd_angles(rc);
    if (cmd == polar) return cmd_polar(rc);
    if (cmd == solve) return cmd_solve(rc, init_dir);
    if (cmd == sweep) return cmd_sweep(rc);
    return cmd_verify(verify_path, report_out);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInput;
  }
}

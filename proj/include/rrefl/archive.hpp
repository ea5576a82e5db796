#pragma once

// Run archive: meta.json, shock.csv, field.csv and residuals.csv in one
// directory, all floating point written with 17 significant digits.

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/field.hpp"
#include "rrefl/gas.hpp"
#include "rrefl/geometry.hpp"
#include "rrefl/hash.hpp"
#include "rrefl/solver.hpp"

namespace rrefl {

inline constexpr int kArchiveVersion = 1;

inline nlohmann::ordered_json to_json(const IterationParams& it) {
  nlohmann::ordered_json j;
  j["cutoff_width"] = it.cutoff_width;
  j["cutoff_depth"] = it.cutoff_depth;
  j["cutoff_enabled"] = it.cutoff_enabled;
  j["relax"] = it.relax;
  j["anderson_depth"] = it.anderson_depth;
  j["tol_fixed_point"] = it.tol_fixed_point;
  j["max_outer"] = it.max_outer;
  j["newton_tol"] = it.newton_tol;
  j["max_newton"] = it.max_newton;
  j["stretch"] = it.stretch;
  j["sigma"] = it.sigma;
  return j;
}

/// Missing keys keep their defaults.
inline IterationParams iteration_params_from_json(const nlohmann::json& j, IterationParams it = {}) {
  const auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("cutoff_width", it.cutoff_width);
  get("cutoff_depth", it.cutoff_depth);
  get("cutoff_enabled", it.cutoff_enabled);
  get("relax", it.relax);
  get("anderson_depth", it.anderson_depth);
  get("tol_fixed_point", it.tol_fixed_point);
  get("max_outer", it.max_outer);
  get("newton_tol", it.newton_tol);
  get("max_newton", it.max_newton);
  get("stretch", it.stretch);
  get("sigma", it.sigma);
  return it;
}

inline void validate(const IterationParams& it) {
  if (!(it.cutoff_width > 0.0)) fail(ErrorKind::InvalidParameter, "cutoff_width must be positive");
  if (!(it.cutoff_depth >= 0.0 && it.cutoff_depth < 1.0)) fail(ErrorKind::InvalidParameter, "cutoff_depth must lie in [0, 1)");
  if (!(it.relax > 0.0 && it.relax <= 1.0)) fail(ErrorKind::InvalidParameter, "relax must lie in (0, 1]");
  if (!(it.tol_fixed_point > 0.0) || !(it.newton_tol > 0.0)) fail(ErrorKind::InvalidParameter, "tolerances must be positive");
  if (it.max_outer < 1 || it.max_newton < 1) fail(ErrorKind::InvalidParameter, "iteration limits must be positive");
  if (it.anderson_depth < 0) fail(ErrorKind::InvalidParameter, "anderson_depth must be non-negative");
  if (!(it.stretch >= 0.0 && it.stretch < 1.0)) fail(ErrorKind::InvalidParameter, "stretch must lie in [0, 1)");
  if (!(it.sigma > 0.0)) fail(ErrorKind::InvalidParameter, "sigma must be positive");
}

namespace detail {

inline nlohmann::ordered_json point_json(Vec2 p) {
  const auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  return nlohmann::ordered_json::array({num(p.x), num(p.y)});
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::ArchiveError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::ArchiveError, "cannot write " + p.string());
  out << text;
  if (!out) fail(ErrorKind::ArchiveError, "write failed for " + p.string());
}

/// Rows of a CSV file with a header line; every row must have `columns` numbers.
inline std::vector<std::vector<double>> parse_csv(const std::string& text, std::size_t columns, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::ArchiveError, name + " is empty");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorKind::ArchiveError, name + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != columns) fail(ErrorKind::ArchiveError, name + ": expected " + std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline std::string shock_csv(const ShockCurve& shock) {
  std::string s = "T,S,xi1,xi2\n";
  const auto t = shock.T();
  const auto sv = shock.S();
  for (std::size_t k = 0; k < shock.points.size(); ++k) {
    s += fmt17(t[k]) + ',' + fmt17(sv[k]) + ',' + fmt17(shock.points[k].x) + ',' + fmt17(shock.points[k].y) + '\n';
  }
  return s;
}

inline std::string field_csv(const SolutionField& sol) {
  std::string s = "i,j,xi1,xi2,phi,grad_norm,rho,ellipticity_margin\n";
  const auto samples = node_samples(sol);
  for (int j = 0; j < sol.n2(); ++j) {
    for (int i = 0; i < sol.n1(); ++i) {
      const std::size_t k = sol.map.index(i, j);
      const Vec2 x = sol.map.node(i, j);
      const auto& smp = samples[k];
      const double rho = density(norm_sq(smp.grad), smp.phi, sol.config.params);
      s += std::to_string(i) + ',' + std::to_string(j) + ',' + fmt17(x.x) + ',' + fmt17(x.y) + ',' + fmt17(smp.phi) +
           ',' + fmt17(norm(smp.grad)) + ',' + fmt17(rho) + ',' +
           fmt17(ellipticity_margin(smp.grad, smp.phi, sol.config.params)) + '\n';
    }
  }
  return s;
}

inline std::string residuals_csv(const SolutionField& sol) {
  std::string s = "iteration,shock_movement,interior_residual,field_change\n";
  for (const auto& r : sol.residual_history) {
    s += std::to_string(r.iteration) + ',' + fmt17(r.shock_movement) + ',' + fmt17(r.interior_residual) + ',' +
         fmt17(r.field_change) + '\n';
  }
  return s;
}

inline nlohmann::ordered_json meta_json(const SolutionField& sol, const std::string& shock_text,
                                        const std::string& field_text, const nlohmann::ordered_json& run = {}) {
  const auto& cfg = sol.config;
  nlohmann::ordered_json j;
  j["version"] = kArchiveVersion;
  j["params"] = {{"rho0", cfg.params.rho0}, {"rho1", cfg.params.rho1}, {"gamma", cfg.params.gamma}};
  j["theta_w"] = cfg.theta_w;
  j["theta_w_deg"] = cfg.theta_w * 180.0 / std::numbers::pi;
  j["regime"] = std::string(to_string(cfg.regime));
  j["mach_p0"] = cfg.mach_p0;
  j["n1"] = sol.n1();
  j["n2"] = sol.n2();
  j["iteration"] = to_json(sol.iter);
  j["status"] = sol.status;
  j["outer_iterations"] = sol.residual_history.size();
  j["points"] = {{"P0", detail::point_json(cfg.p0)}, {"P1", detail::point_json(cfg.p1)},
                 {"P2", detail::point_json(sol.shock.points.back())}, {"P3", detail::point_json(cfg.p3)},
                 {"P4", detail::point_json(cfg.p4)}};
  j["state2"] = {{"u", cfg.state2.u}, {"v", cfg.state2.v}, {"k", cfg.state2.k}, {"rho", cfg.state2.rho}, {"c", cfg.state2.c}};
  j["hashes"] = {{"shock_csv", hex64(fnv1a(shock_text))}, {"field_csv", hex64(fnv1a(field_text))},
                 {"solution", solution_hash(sol)}};
  if (!run.is_null()) j["run"] = run;
  return j;
}

/// Writes the four archive files into `dir` (created if needed). `run` is an
/// optional block describing the command that produced the solution.
inline void write_archive(const std::filesystem::path& dir, const SolutionField& sol,
                          const nlohmann::ordered_json& run = {}) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::ArchiveError, "cannot create " + dir.string() + ": " + ec.message());
  const std::string shock_text = shock_csv(sol.shock);
  const std::string field_text = field_csv(sol);
  detail::write_file(dir / "shock.csv", shock_text);
  detail::write_file(dir / "field.csv", field_text);
  detail::write_file(dir / "residuals.csv", residuals_csv(sol));
  detail::write_file(dir / "meta.json", meta_json(sol, shock_text, field_text, run).dump(2) + "\n");
}

struct LoadedArchive {
  SolutionField solution;
  nlohmann::json meta;
  std::vector<std::string> warnings;
};

/// Reads an archive back. The configuration is recomputed from the stored
/// parameters and the mesh is rebuilt from the stored shock; a stored node
/// that disagrees with the rebuilt mesh makes the archive inconsistent.
/// Hash mismatches are reported as warnings.
inline LoadedArchive read_archive(const std::filesystem::path& dir) {
  LoadedArchive out;
  const std::string meta_text = detail::read_file(dir / "meta.json");
  try {
    out.meta = nlohmann::json::parse(meta_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ArchiveError, std::string("meta.json: ") + e.what());
  }
  const std::string shock_text = detail::read_file(dir / "shock.csv");
  const std::string field_text = detail::read_file(dir / "field.csv");
  const auto& m = out.meta;
  SolutionField& sol = out.solution;
  try {
    const auto& p = m.at("params");
    const GasParams params = GasParams::make(p.at("rho0").get<double>(), p.at("rho1").get<double>(),
                                             p.at("gamma").get<double>(), true);
    sol.iter = iteration_params_from_json(m.at("iteration"));
    sol.config = build_configuration(params, m.at("theta_w").get<double>(), sol.iter.sigma);
    sol.status = m.value("status", std::string("converged"));
    const int n1 = m.at("n1").get<int>(), n2 = m.at("n2").get<int>();
    const auto shock_rows = detail::parse_csv(shock_text, 4, "shock.csv");
    if (static_cast<int>(shock_rows.size()) != n2) fail(ErrorKind::ArchiveError, "shock.csv row count does not match n2");
    for (const auto& r : shock_rows) sol.shock.points.push_back({r[2], r[3]});
    sol.map = build_square_map(sol.config, sol.shock, n1, n2, sol.iter.stretch);
    const auto field_rows = detail::parse_csv(field_text, 8, "field.csv");
    if (field_rows.size() != sol.map.size()) fail(ErrorKind::ArchiveError, "field.csv row count does not match the grid");
    sol.phi.assign(sol.map.size(), 0.0);
    double scale = 1.0;
    for (const Vec2& q : sol.map.nodes()) scale = std::max(scale, norm(q));
    for (const auto& r : field_rows) {
      const int i = static_cast<int>(r[0]), j = static_cast<int>(r[1]);
      if (i < 0 || j < 0 || i >= n1 || j >= n2) fail(ErrorKind::ArchiveError, "field.csv node index out of range");
      if (distance(sol.map.node(i, j), {r[2], r[3]}) > 1e-9 * scale) {
        fail(ErrorKind::ArchiveError, "field.csv node (" + std::to_string(i) + ", " + std::to_string(j) +
                                          ") does not lie on the mesh rebuilt from shock.csv");
      }
      sol.phi[sol.map.index(i, j)] = r[4];
    }
    if (m.contains("hashes")) {
      const auto& h = m.at("hashes");
      if (h.value("shock_csv", "") != hex64(fnv1a(shock_text))) out.warnings.push_back("shock.csv hash mismatch");
      if (h.value("field_csv", "") != hex64(fnv1a(field_text))) out.warnings.push_back("field.csv hash mismatch");
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ArchiveError, std::string("meta.json: ") + e.what());
  }
  if (std::filesystem::exists(dir / "residuals.csv")) {
    for (const auto& r : detail::parse_csv(detail::read_file(dir / "residuals.csv"), 4, "residuals.csv")) {
      sol.residual_history.push_back({static_cast<int>(r[0]), r[1], r[2], r[3]});
    }
  }
  return out;
}

}  // namespace rrefl

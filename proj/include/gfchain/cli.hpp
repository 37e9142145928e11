#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gfchain/analysis.hpp"
#include "gfchain/csv.hpp"
#include "gfchain/error.hpp"
#include "gfchain/grid.hpp"
#include "gfchain/kernel.hpp"
#include "gfchain/measures.hpp"
#include "gfchain/model.hpp"
#include "gfchain/sampler.hpp"

namespace gfchain::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInvalidConfig = 2,
  kNoConvergence = 3,
  kIoFailure = 4,
};

struct RunConfig {
  std::string command;  // kernel | invariant | simulate | refine | check
  std::string model = "example1";
  std::string table;  // CSV with columns x,s when model == "table"
  double a = 5.0;
  std::size_t n_x = 500;
  double tol = 1e-12;
  long max_iter = 100000;
  std::uint64_t seed = 1;
  std::size_t n_steps = 1000;
  double init = 1.0;
  int levels = 6;
  double h_max = 0.1;
  std::string out;
  // check: growth constants m,M,alpha,X0 and sample points
  std::vector<double> growth;
  std::vector<double> drift_x{2.0, 3.0, 4.0, 6.0};
  double tail_x = 1.0;
  std::vector<double> tail_xprime{1.0, 2.0, 3.0};
  double quad_step = 1e-3;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"kernel", "invariant", "simulate", "refine", "check"};
  return names;
}

/// Structural checks that do not need the model.
inline void validate(const RunConfig& c) {
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), c.command) == names.end()) {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  if (!(c.a > 0.0)) throw ConfigError("--a must be positive");
  if (c.n_x < 2 || c.n_x % 2 != 0) throw ConfigError("--nx must be even and >= 2");
  if (!(c.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (c.max_iter < 1) throw ConfigError("--max-iter must be positive");
  if (c.out.empty()) throw ConfigError("--out is required");
  if (c.model == "table") {
    if (c.table.empty()) throw ConfigError("model 'table' needs --table <path>");
    if (!std::filesystem::exists(c.table)) throw ConfigError("table file '" + c.table + "' does not exist");
  } else if (!parse_builtin(c.model)) {
    throw ConfigError("unknown model '" + c.model + "'");
  }
  if (!c.growth.empty() && c.growth.size() != 4) throw ConfigError("--growth takes m,M,alpha,X0");
  if (c.command == "refine" && c.levels < 2) throw ConfigError("--levels must be at least 2");
}

/// Loads a two-column x,s table whose abscissae must be exactly the grid
/// points x_1..x_{n_x} (x_0 may be present and is ignored).
inline ModelSpec load_table(const std::string& path, const Grid& grid) {
  const auto t = csv::read(path, true);
  if (t.header.size() != 2 || t.header[0] != "x" || t.header[1] != "s") {
    throw ConfigError("table '" + path + "' must have header 'x,s'");
  }
  std::vector<double> xs, ss;
  for (const auto& row : t.rows) {
    if (row.size() != 2) throw ConfigError("table '" + path + "' rows must have two columns");
    if (row[0] == 0.0) continue;
    xs.push_back(row[0]);
    ss.push_back(row[1]);
  }
  if (xs.size() != grid.n_x()) {
    std::ostringstream os;
    os << "table '" << path << "' has " << xs.size() << " positive abscissae, grid has " << grid.n_x();
    throw ConfigError(os.str());
  }
  auto model = ModelSpec::tabulated(xs, ss, "table");
  const auto pts = model.table_points();
  for (std::size_t j = 1; j <= grid.n_x(); ++j) {
    const double x = grid.point(j);
    if (std::abs(pts[j - 1] - x) > 1e-12 * std::max(1.0, x)) {
      std::ostringstream os;
      os << "table '" << path << "' abscissa " << pts[j - 1] << " is not grid point x_" << j << "=" << x;
      throw ConfigError(os.str());
    }
  }
  return model;
}

inline ModelSpec make_model(const RunConfig& c, const Grid& grid) {
  ModelSpec model = c.model == "table" ? load_table(c.table, grid) : ModelSpec::builtin(*parse_builtin(c.model));
  if (!c.growth.empty()) model = model.with_growth({c.growth[0], c.growth[1], c.growth[2], c.growth[3]});
  return model;
}

inline int run_checked(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validate(c);
  const Grid grid = c.command == "refine" ? Grid::with_mesh(c.a, c.h_max) : Grid(c.a, c.n_x);
  for (const auto& w : grid.warnings()) err << "warning: " << w << '\n';
  const ModelSpec model = make_model(c, grid);

  if (c.command == "kernel") {
    write_matrix_csv(build_matrix(model, grid), c.out);
    out << "wrote " << grid.chain_units() << "x" << grid.chain_units() << " matrix to " << c.out << '\n';
  } else if (c.command == "invariant") {
    const auto result = invariant_measure(build_matrix(model, grid), c.tol, c.max_iter);
    write_measure_csv(result.measure, c.out);
    out << "iterations " << result.iterations << " residual " << csv::number(result.residual) << '\n';
  } else if (c.command == "simulate") {
    const auto path = simulate_path(model, grid, c.init, c.n_steps, c.seed);
    write_trajectory_csv(path, c.out);
    out << "wrote " << path.size() << " sizes to " << c.out << '\n';
  } else if (c.command == "refine") {
    const auto report = refinement_study(model, c.a, c.h_max, c.levels, c.tol, c.max_iter);
    write_convergence_csv(report, c.out);
    out << "order " << csv::number(report.order) << " tail_order " << csv::number(report.tail_order) << '\n';
  } else {
    const std::vector<DiagnosticsReport> reports{drift_check(model, c.drift_x, c.quad_step),
                                                 tail_check(model, c.tail_x, c.tail_xprime, c.quad_step)};
    write_diagnostics_csv(reports, c.out);
    bool ok = true;
    for (const auto& r : reports) {
      out << r.kind << (r.passed ? " pass" : " FAIL") << '\n';
      ok = ok && r.passed;
    }
    return ok ? kOk : kCheckFailed;
  }
  return kOk;
}

inline std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

/// Runs one command; failures are reported as a single line
/// `error: code=<n> kind=<kind> message=<text>` on `err`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto fail = [&](int code, const char* kind, const std::string& msg) {
    err << "error: code=" << code << " kind=" << kind << " message=" << one_line(msg) << '\n';
    return code;
  };
  try {
    return run_checked(c, out, err);
  } catch (const ConvergenceError& e) {
    return fail(kNoConvergence, "convergence", e.what());
  } catch (const IoError& e) {
    return fail(kIoFailure, "io", e.what());
  } catch (const EvaluationError& e) {
    return fail(kInvalidConfig, "evaluation", e.what());
  } catch (const Error& e) {
    return fail(kInvalidConfig, "config", e.what());
  }
}

}  // namespace gfchain::cli

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gfchain/csv.hpp"
#include "gfchain/error.hpp"
#include "gfchain/grid.hpp"
#include "gfchain/kernel.hpp"
#include "gfchain/measures.hpp"
#include "gfchain/model.hpp"

namespace gfchain {

struct ConvergenceLevel {
  double h;
  double tv_error;  // ||pi_{a,h} - pi_{a,2h}||_1
  double ratio;     // error at 2h over error at h; NaN on the first level
  long iterations;  // power iterations spent on pi_{a,h}
};

struct ConvergenceReport {
  std::string model;
  double a = 0.0;
  std::vector<ConvergenceLevel> levels;
  double order = std::numeric_limits<double>::quiet_NaN();       // slope over all levels
  double tail_order = std::numeric_limits<double>::quiet_NaN();  // slope over the last three
};

/// Least-squares slope of log(error) against log(h).
inline double fit_order(const std::vector<double>& hs, const std::vector<double>& errors) {
  if (hs.size() != errors.size() || hs.size() < 3) {
    throw DomainError("order fit needs at least three (h, error) points");
  }
  const double n = static_cast<double>(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (!(hs[k] > 0.0) || !(errors[k] > 0.0)) throw DomainError("order fit needs positive h and errors");
    const double lx = std::log(hs[k]);
    const double ly = std::log(errors[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double order_estimate(const ConvergenceReport& report, std::size_t last = 0) {
  const auto& lv = report.levels;
  const std::size_t from = (last == 0 || last > lv.size()) ? 0 : lv.size() - last;
  std::vector<double> hs, errs;
  for (std::size_t k = from; k < lv.size(); ++k) {
    hs.push_back(lv[k].h);
    errs.push_back(lv[k].tv_error);
  }
  return fit_order(hs, errs);
}

inline InvariantResult invariant_at(const ModelSpec& model, const Grid& grid, double tol, long max_iter) {
  return invariant_measure(build_matrix(model, grid), tol, max_iter);
}

/// Invariant measures at h_max/2^l for l = 0..levels-1, each compared with
/// the one at twice its mesh (the first against 2*h_max).
inline ConvergenceReport refinement_study(const ModelSpec& model, double a, double h_max, int levels,
                                          double tol = 1e-12, long max_iter = 100000) {
  if (levels < 2) throw ConfigError("a refinement study needs at least 2 levels");
  if (model.tabulated()) throw ConfigError("tabulated models are bound to one grid and cannot be refined");
  const Grid finest_first = Grid::with_mesh(a, h_max);
  if (finest_first.n_x() % 4 != 0) {
    std::ostringstream os;
    os << "a/h_max = " << finest_first.n_x() << " must be divisible by 4 so that the 2*h_max grid is even";
    throw ConfigError(os.str());
  }
  ConvergenceReport report;
  report.model = model.tag();
  report.a = a;

  Grid coarse_grid(a, finest_first.n_x() / 2);
  auto coarse = invariant_at(model, coarse_grid, tol, max_iter);
  for (int l = 0; l < levels; ++l) {
    const Grid grid(a, finest_first.n_x() << l);
    auto fine = invariant_at(model, grid, tol, max_iter);
    ConvergenceLevel level{grid.h(), tv_cross_grid(fine.measure, coarse.measure),
                           std::numeric_limits<double>::quiet_NaN(), fine.iterations};
    if (!report.levels.empty()) level.ratio = report.levels.back().tv_error / level.tv_error;
    report.levels.push_back(level);
    coarse = std::move(fine);
  }
  if (report.levels.size() >= 3) {
    report.order = order_estimate(report);
    report.tail_order = order_estimate(report, 3);
  }
  return report;
}

/// l1 distance between pi_{a_small,h} (zero padded) and pi_{a_large,h}.
inline double truncation_gap(const ModelSpec& model, double a_small, double a_large, double h,
                             double tol = 1e-12, long max_iter = 100000) {
  const Grid small = Grid::with_mesh(a_small, h);
  const Grid large = Grid::with_mesh(a_large, h);
  if (large.n_x() < small.n_x()) throw ConfigError("a_large must not be smaller than a_small");
  const auto pi_small = invariant_at(model, small, tol, max_iter).measure;
  const auto pi_large = invariant_at(model, large, tol, max_iter).measure;
  return tv_same_grid(zero_pad(pi_small, large, large.chain_units()), pi_large);
}

struct DiagnosticSample {
  double x;
  double lhs;
  double bound;
  bool pass;
};

struct DiagnosticsReport {
  std::string kind;  // "drift" or "tail"
  std::vector<DiagnosticSample> samples;
  bool passed = true;
};

inline constexpr double kDiagnosticSlack = 0.05;

namespace detail {

inline const GrowthParams& require_growth(const ModelSpec& model) {
  if (!model.growth()) {
    throw ConfigError("model '" + model.tag() + "' has no declared growth constants (m, M, alpha, X0)");
  }
  return *model.growth();
}

inline void add_sample(DiagnosticsReport& r, double x, double lhs, double bound, double slack) {
  const bool ok = lhs <= (1.0 + slack) * bound;
  r.samples.push_back({x, lhs, bound, ok});
  r.passed = r.passed && ok;
}

}  // namespace detail

/// Checks PV(x) <= C1 V(x) exp(-C2 (x/2)^alpha) at each sample (x > 2 X0).
inline DiagnosticsReport drift_check(const ModelSpec& model, const std::vector<double>& xs,
                                     double quad_step = 1e-3, double slack = kDiagnosticSlack) {
  const auto& g = detail::require_growth(model);
  DiagnosticsReport report{"drift", {}, true};
  for (double x : xs) {
    if (!(x > 2.0 * g.x0)) {
      std::ostringstream os;
      os << "drift sample x=" << x << " must exceed 2*X0=" << 2.0 * g.x0;
      throw DomainError(os.str());
    }
    const double lhs = continuous_pv(model, x, quad_step);
    const double bound = g.c1() * lyapunov_v(model, x, quad_step) * std::exp(-g.c2() * std::pow(0.5 * x, g.alpha));
    detail::add_sample(report, x, lhs, bound, slack);
  }
  return report;
}

/// Checks int_{x'}^inf p(x,y)V(y)dy <= C1 V(x) exp(-C2 x'^alpha) at each x'.
inline DiagnosticsReport tail_check(const ModelSpec& model, double x, const std::vector<double>& x_primes,
                                    double quad_step = 1e-3, double slack = kDiagnosticSlack) {
  const auto& g = detail::require_growth(model);
  DiagnosticsReport report{"tail", {}, true};
  const double vx = lyapunov_v(model, x, quad_step);
  for (double xp : x_primes) {
    if (xp < 0.0) throw DomainError("tail sample x' must be nonnegative");
    const double lhs = tail_pv(model, x, xp, quad_step);
    const double bound = g.c1() * vx * std::exp(-g.c2() * std::pow(xp, g.alpha));
    detail::add_sample(report, xp, lhs, bound, slack);
  }
  return report;
}

inline void write_convergence_csv(const ConvergenceReport& r, const std::string& path) {
  auto out = csv::open_for_write(path);
  out << "h,tv_error,ratio\n";
  for (const auto& l : r.levels) {
    out << csv::number(l.h) << ',' << csv::number(l.tv_error) << ',' << csv::number(l.ratio) << '\n';
  }
  csv::finish(out, path);
}

inline void write_diagnostics_csv(const std::vector<DiagnosticsReport>& reports, const std::string& path) {
  auto out = csv::open_for_write(path);
  out << "x,lhs,bound,pass\n";
  for (const auto& r : reports) {
    for (const auto& s : r.samples) {
      out << csv::number(s.x) << ',' << csv::number(s.lhs) << ',' << csv::number(s.bound) << ','
          << (s.pass ? 1 : 0) << '\n';
    }
  }
  csv::finish(out, path);
}

}  // namespace gfchain

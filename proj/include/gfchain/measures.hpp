#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gfchain/csv.hpp"
#include "gfchain/error.hpp"
#include "gfchain/grid.hpp"
#include "gfchain/kernel.hpp"

namespace gfchain {

/// Piecewise-uniform measure: masses[k-1] is the mass of unit E_k, spread
/// uniformly over it. Chain measures have n_x/2+1 units, full projections
/// n_x+1.
struct PiecewiseUniformMeasure {
  Grid grid;
  std::vector<double> masses;

  std::size_t size() const noexcept { return masses.size(); }
  double total() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

  bool is_probability(double tol = 1e-12) const {
    for (double m : masses) {
      if (!(m >= 0.0)) return false;
    }
    return std::abs(total() - 1.0) <= tol;
  }

  /// Equal masses on all units.
  static PiecewiseUniformMeasure uniform(const Grid& grid, std::size_t units) {
    return {grid, std::vector<double>(units, 1.0 / static_cast<double>(units))};
  }

  static PiecewiseUniformMeasure point_mass(const Grid& grid, std::size_t units, std::size_t unit) {
    if (unit == 0 || unit > units) throw DomainError("point mass unit out of range");
    std::vector<double> m(units, 0.0);
    m[unit - 1] = 1.0;
    return {grid, std::move(m)};
  }
};

/// Finite-volume projection: mass of each unit E_1..E_{n_x} kept, mass of
/// (a, inf) sent to the appended unit E_{n_x+1}.
inline PiecewiseUniformMeasure project_fv(const std::function<double(double)>& cdf, const Grid& grid) {
  std::vector<double> masses(grid.full_units());
  double prev = cdf(0.0);
  for (std::size_t j = 1; j <= grid.n_x(); ++j) {
    const double cur = cdf(grid.point(j));
    if (cur < prev) {
      std::ostringstream os;
      os << "cdf decreases between x=" << grid.point(j - 1) << " and x=" << grid.point(j);
      throw DomainError(os.str());
    }
    masses[j - 1] = cur - prev;
    prev = cur;
  }
  if (prev > 1.0) throw DomainError("cdf exceeds 1 inside the grid");
  masses[grid.n_x()] = 1.0 - prev;
  return {grid, std::move(masses)};
}

/// One step of the measure recurrence mu <- mu P.
inline PiecewiseUniformMeasure evolve_step(const PiecewiseUniformMeasure& mu, const TransitionMatrix& p) {
  if (mu.size() != p.dim() || mu.grid.n_x() != p.grid().n_x()) {
    std::ostringstream os;
    os << "measure of " << mu.size() << " units cannot be pushed through a " << p.dim() << "x"
       << p.dim() << " matrix";
    throw DimensionError(os.str());
  }
  const std::size_t n = p.dim();
  std::vector<double> next(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double w = mu.masses[r];
    if (w == 0.0) continue;
    const auto row = p.row(r);
    for (std::size_t c = 0; c < n; ++c) next[c] += w * row[c];
  }
  return {mu.grid, std::move(next)};
}

/// One step of the kernel applied to a full-grid measure (units E_1..E_{n_x+1}),
/// giving a measure on the chain units E_1..E_{n_x/2+1}.
inline PiecewiseUniformMeasure push_forward(const PiecewiseUniformMeasure& mu, const Kernel& kernel) {
  if (!mu.grid.same_as(kernel.grid())) throw DimensionError("measure and kernel live on different grids");
  std::vector<double> next(kernel.dim(), 0.0);
  for (std::size_t k = 1; k <= mu.size(); ++k) {
    const double w = mu.masses[k - 1];
    if (w == 0.0) continue;
    const auto row = kernel.row(k);
    for (std::size_t c = 0; c < row.size(); ++c) next[c] += w * row[c];
  }
  return {mu.grid, std::move(next)};
}

inline double tv_same_grid(const PiecewiseUniformMeasure& mu, const PiecewiseUniformMeasure& nu) {
  if (!mu.grid.same_as(nu.grid) || mu.size() != nu.size()) {
    throw DimensionError("total variation needs measures on the same grid and units");
  }
  double d = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) d += std::abs(mu.masses[k] - nu.masses[k]);
  return d;
}

/// l1 distance between a measure at mesh h and one at mesh 2h on the same
/// range: fine unit i sits in coarse unit ceil(i/2), which carries twice the
/// width. Coarse units past the end count as zero.
inline double tv_cross_grid(const PiecewiseUniformMeasure& fine, const PiecewiseUniformMeasure& coarse) {
  const double a_f = fine.grid.a();
  const double a_c = coarse.grid.a();
  if (fine.grid.n_x() != 2 * coarse.grid.n_x() || std::abs(a_f - a_c) > 1e-12 * std::max(a_f, a_c)) {
    throw DimensionError("cross-grid distance needs the same range and a fine grid of twice the cells");
  }
  double d = 0.0;
  for (std::size_t i = 1; i <= fine.size(); ++i) {
    const std::size_t j = (i + 1) / 2;
    const double c = j <= coarse.size() ? coarse.masses[j - 1] : 0.0;
    d += std::abs(fine.masses[i - 1] - 0.5 * c);
  }
  return d;
}

/// Measure on the grid with twice the cells that splits each unit's mass
/// evenly between its two halves.
inline PiecewiseUniformMeasure refine(const PiecewiseUniformMeasure& coarse) {
  const Grid fine_grid(coarse.grid.a(), 2 * coarse.grid.n_x());
  std::vector<double> m;
  m.reserve(2 * coarse.size());
  for (double c : coarse.masses) {
    m.push_back(0.5 * c);
    m.push_back(0.5 * c);
  }
  return {fine_grid, std::move(m)};
}

struct InvariantResult {
  PiecewiseUniformMeasure measure;
  long iterations;
  double residual;  // l1 change of the final iteration
};

/// Power iteration mu <- mu P until the l1 change is at most tol.
inline InvariantResult invariant_measure(const TransitionMatrix& p, const PiecewiseUniformMeasure& init,
                                         double tol = 1e-12, long max_iter = 100000) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (!init.is_probability(1e-9)) throw DomainError("initial vector must be a probability vector");
  PiecewiseUniformMeasure mu = init;
  double residual = 0.0;
  for (long it = 1; it <= max_iter; ++it) {
    auto next = evolve_step(mu, p);
    residual = tv_same_grid(next, mu);
    mu = std::move(next);
    if (residual <= tol) return {std::move(mu), it, residual};
  }
  std::ostringstream os;
  os << "power iteration did not converge in " << max_iter << " iterations (last l1 change "
     << residual << ")";
  throw ConvergenceError(os.str(), residual, max_iter);
}

inline InvariantResult invariant_measure(const TransitionMatrix& p, double tol = 1e-12,
                                         long max_iter = 100000) {
  return invariant_measure(p, PiecewiseUniformMeasure::uniform(p.grid(), p.dim()), tol, max_iter);
}

/// Densities masses/h.
inline std::vector<double> to_density(const PiecewiseUniformMeasure& mu) {
  std::vector<double> d(mu.size());
  const double h = mu.grid.h();
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = mu.masses[k] / h;
  return d;
}

/// Copy of mu on `target` (same mesh, more units), zero beyond mu's support.
inline PiecewiseUniformMeasure zero_pad(const PiecewiseUniformMeasure& mu, const Grid& target,
                                        std::size_t units) {
  if (std::abs(target.h() - mu.grid.h()) > 1e-12 * mu.grid.h() || units < mu.size()) {
    throw DimensionError("zero padding needs the same mesh and at least as many units");
  }
  std::vector<double> m(units, 0.0);
  std::copy(mu.masses.begin(), mu.masses.end(), m.begin());
  return {target, std::move(m)};
}

inline void write_measure_csv(const PiecewiseUniformMeasure& mu, const std::string& path) {
  auto out = csv::open_for_write(path);
  out << "x_left,x_right,mass,density\n";
  const auto dens = to_density(mu);
  for (std::size_t k = 1; k <= mu.size(); ++k) {
    out << csv::number(mu.grid.unit_left(k)) << ',' << csv::number(mu.grid.unit_right(k)) << ','
        << csv::number(mu.masses[k - 1]) << ',' << csv::number(dens[k - 1]) << '\n';
  }
  csv::finish(out, path);
}

}  // namespace gfchain

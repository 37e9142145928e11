#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gfchain/csv.hpp"
#include "gfchain/error.hpp"
#include "gfchain/grid.hpp"
#include "gfchain/model.hpp"

namespace gfchain {

/// Discretized complementary distribution of the division size from x_i:
/// Q[k] = exp(-(prefix[max(i,k)] - prefix[i])), k = 0..n_x. Q[k] = 1 for k <= i.
inline std::vector<double> compute_q_row(std::span<const double> prefix, std::size_t i) {
  if (prefix.empty() || i >= prefix.size()) {
    std::ostringstream os;
    os << "grid index " << i << " outside 0.." << (prefix.empty() ? 0 : prefix.size() - 1);
    throw DomainError(os.str());
  }
  std::vector<double> q(prefix.size(), 1.0);
  for (std::size_t k = i + 1; k < prefix.size(); ++k) {
    q[k] = std::exp(-(prefix[k] - prefix[i]));
  }
  return q;
}

/// Unit-to-unit probabilities from a Q-row: entry k-1 holds
/// Q[2k-2] - Q[2k] for k = 1..n_x/2, the final entry holds Q[n_x].
/// Entries below unit ceil(i/2) vanish because Q is clamped to 1 there.
inline std::vector<double> transition_row(std::span<const double> q, const Grid& grid) {
  if (q.size() != grid.n_x() + 1) throw DimensionError("Q-row length does not match the grid");
  const std::size_t half = grid.n_x() / 2;
  std::vector<double> row(half + 1, 0.0);
  for (std::size_t k = 1; k <= half; ++k) row[k - 1] = q[2 * k - 2] - q[2 * k];
  row[half] = q[grid.n_x()];
  return row;
}

/// Numerical transition kernel in O(n_x) storage: the grid and the prefix
/// sums of S. Rows are generated on demand.
class Kernel {
 public:
  Kernel(const ModelSpec& model, const Grid& grid)
      : grid_(grid), prefix_(prefix_integral(model, grid)), tag_(model.tag()) {}

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> prefix() const noexcept { return prefix_; }
  const std::string& tag() const noexcept { return tag_; }
  std::size_t dim() const noexcept { return grid_.chain_units(); }

  /// Grid index used for a state in unit E_unit: min(n_x, unit).
  std::size_t start_index(std::size_t unit) const noexcept { return std::min(grid_.n_x(), unit); }

  /// Law of the next unit for a state in E_unit, unit = 1..n_x+1 (or beyond).
  std::vector<double> row(std::size_t unit) const {
    if (unit == 0) throw DomainError("units are numbered from 1");
    return transition_row(compute_q_row(prefix_, start_index(unit)), grid_);
  }

 private:
  Grid grid_;
  std::vector<double> prefix_;
  std::string tag_;
};

/// Dense row-stochastic matrix over the chain units E_1..E_{n_x/2+1}.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(const Kernel& kernel)
      : grid_(kernel.grid()), tag_(kernel.tag()), dim_(kernel.dim()), data_(dim_ * dim_) {
    for (std::size_t r = 0; r < dim_; ++r) {
      const auto row = kernel.row(r + 1);
      std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
    }
  }

  /// Matrix from explicit rows; used for synthetic chains in tests.
  TransitionMatrix(const Grid& grid, std::string tag, std::vector<std::vector<double>> rows)
      : grid_(grid), tag_(std::move(tag)), dim_(rows.size()), data_(dim_ * dim_) {
    if (dim_ != grid.chain_units()) throw DimensionError("matrix rows do not match the grid's chain units");
    for (std::size_t r = 0; r < dim_; ++r) {
      if (rows[r].size() != dim_) throw DimensionError("matrix is not square");
      std::copy(rows[r].begin(), rows[r].end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  const Grid& grid() const noexcept { return grid_; }
  const std::string& tag() const noexcept { return tag_; }

  /// Zero-based row r (unit r+1).
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * dim_, dim_};
  }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  /// Largest |row sum - 1| over all rows.
  double max_row_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      double sum = 0.0;
      for (double v : row(r)) sum += v;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
  }

 private:
  Grid grid_;
  std::string tag_;
  std::size_t dim_;
  std::vector<double> data_;
};

inline TransitionMatrix build_matrix(const ModelSpec& model, const Grid& grid) {
  return TransitionMatrix(Kernel(model, grid));
}

inline void write_matrix_csv(const TransitionMatrix& m, const std::string& path) {
  auto out = csv::open_for_write(path);
  out << "# gf-kernel matrix a=" << csv::number(m.grid().a()) << " nx=" << m.grid().n_x()
      << " model=" << m.tag() << '\n';
  for (std::size_t r = 0; r < m.dim(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << csv::number(row[c]);
    }
    out << '\n';
  }
  csv::finish(out, path);
}

}  // namespace gfchain

#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "gfchain/error.hpp"

namespace gfchain {

/// Uniform grid on (0, a] with an even number of cells.
///
/// Grid points are x_j = j*h for j = 0..n_x; unit E_j is the right-closed
/// cell (x_{j-1}, x_j]. Units past n_x (E_{n_x+1} = (a, a+h]) use the same
/// formula. Index arithmetic is 1-based for units and 0-based for points,
/// which keeps x_j the right end of E_j.
class Grid {
 public:
  Grid(double a, std::size_t n_x) : a_(a), n_x_(n_x) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw ConfigError("grid range a must be positive and finite");
    }
    if (n_x < 2 || n_x % 2 != 0) {
      std::ostringstream os;
      os << "grid cell count n_x must be even and >= 2, got " << n_x;
      throw ConfigError(os.str());
    }
    h_ = a / static_cast<double>(n_x);
  }

  /// Builds the grid with mesh h; a/h must be an even integer.
  static Grid with_mesh(double a, double h) {
    if (!(h > 0.0)) throw ConfigError("mesh size h must be positive");
    const double cells = a / h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded) || rounded < 1.0) {
      std::ostringstream os;
      os << "a/h = " << cells << " is not an integer";
      throw ConfigError(os.str());
    }
    return Grid(a, static_cast<std::size_t>(rounded));
  }

  double a() const noexcept { return a_; }
  std::size_t n_x() const noexcept { return n_x_; }
  double h() const noexcept { return h_; }

  /// Number of units reachable by the chain after one step: E_1..E_{n_x/2+1}.
  std::size_t chain_units() const noexcept { return n_x_ / 2 + 1; }
  /// Units of the full projection: E_1..E_{n_x+1}.
  std::size_t full_units() const noexcept { return n_x_ + 1; }

  double point(std::size_t j) const noexcept { return static_cast<double>(j) * h_; }
  double unit_left(std::size_t k) const noexcept { return point(k - 1); }
  double unit_right(std::size_t k) const noexcept { return point(k); }

  /// Index k with size in E_k, i.e. ceil(size/h), corrected so that sizes
  /// equal to a computed grid point x_j map to j.
  std::size_t unit_of(double size) const {
    if (!(size > 0.0)) {
      std::ostringstream os;
      os << "size must be positive, got " << size;
      throw DomainError(os.str());
    }
    auto k = static_cast<std::size_t>(std::ceil(size / h_));
    if (k == 0) k = 1;
    while (k > 1 && size <= point(k - 1)) --k;
    while (size > point(k)) ++k;
    return k;
  }

  /// Parameter-sanity warnings (h <= 1, a >= 3h); never fatal.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (h_ > 1.0) {
      std::ostringstream os;
      os << "mesh size h=" << h_ << " exceeds 1";
      out.push_back(os.str());
    }
    if (a_ <= 3.0 * h_) {
      std::ostringstream os;
      os << "range a=" << a_ << " is not larger than 3h=" << 3.0 * h_;
      out.push_back(os.str());
    }
    return out;
  }

  bool same_as(const Grid& other) const noexcept {
    return n_x_ == other.n_x_ && std::abs(a_ - other.a_) <= 1e-12 * std::max(a_, other.a_);
  }

 private:
  double a_;
  std::size_t n_x_;
  double h_;
};

}  // namespace gfchain

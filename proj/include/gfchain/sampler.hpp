#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
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

/// Seeded 64-bit Mersenne Twister stream. Independent streams for parallel
/// trajectories come from split(), which derives a fresh seed by mixing.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  RandomStream split(std::uint64_t stream) const {
    return RandomStream(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard exponential variate.
  double exponential() { return -std::log1p(-uniform()); }

  std::uint64_t seed() const noexcept { return seed_; }

  friend bool operator==(const RandomStream& l, const RandomStream& r) { return l.engine_ == r.engine_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

struct ChainState {
  double size;
  RandomStream rng;
};

struct RoundedSize {
  std::size_t index;  // ceil(size/h)
  bool beyond_grid;   // index > n_x
};

inline RoundedSize round_to_grid(double size, const Grid& grid) {
  const auto i = grid.unit_of(size);
  return {i, i > grid.n_x()};
}

/// Sampler for the discrete chain. Holds only the grid and the prefix sums
/// of S; rows of the transition matrix are never materialized.
class ChainSampler {
 public:
  ChainSampler(const ModelSpec& model, const Grid& grid) : kernel_(model, grid) {}
  explicit ChainSampler(Kernel kernel) : kernel_(std::move(kernel)) {}

  const Grid& grid() const noexcept { return kernel_.grid(); }
  const Kernel& kernel() const noexcept { return kernel_; }

  /// Next unit for a state rounded to grid index i <= n_x, given a standard
  /// exponential draw e: the smallest k with prefix[2k] - prefix[i] > e, or
  /// the appended unit n_x/2+1 when no such k exists. This is inverse-CDF
  /// sampling of Q_{i,2k} < exp(-e) <= Q_{i,2k-2}.
  std::size_t draw_unit(std::size_t i, double e) const {
    const auto prefix = kernel_.prefix();
    const std::size_t half = grid().n_x() / 2;
    const double threshold = prefix[i] + e;
    std::size_t lo = 1;
    std::size_t hi = half + 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (prefix[2 * mid] > threshold) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

  /// Advances the state in place by one transition.
  void advance(ChainState& state) const {
    const Grid& g = grid();
    const auto rounded = round_to_grid(state.size, g);
    std::size_t unit = g.chain_units();
    if (!rounded.beyond_grid) unit = draw_unit(rounded.index, state.rng.exponential());
    state.size = uniform_in_unit(unit, state.rng.uniform());
  }

  ChainState step(ChainState state) const {
    advance(state);
    return state;
  }

 private:
  // Maps u in [0,1) to (x_{k-1}, x_k].
  double uniform_in_unit(std::size_t k, double u) const {
    const double lo = grid().unit_left(k);
    const double hi = grid().unit_right(k);
    double x = hi - (hi - lo) * u;
    if (x <= lo) x = std::nextafter(lo, hi);
    return x;
  }

  Kernel kernel_;
};

inline ChainState step_sample(const ChainSampler& sampler, ChainState state) {
  return sampler.step(std::move(state));
}

/// Sizes init, xi^1, ..., xi^{n_steps} of one trajectory.
inline std::vector<double> simulate_path(const ChainSampler& sampler, double init, std::size_t n_steps,
                                         std::uint64_t seed) {
  if (!(init > 0.0)) throw DomainError("initial size must be positive");
  std::vector<double> path;
  path.reserve(n_steps + 1);
  path.push_back(init);
  ChainState state{init, RandomStream(seed)};
  for (std::size_t n = 0; n < n_steps; ++n) {
    sampler.advance(state);
    path.push_back(state.size);
  }
  return path;
}

inline std::vector<double> simulate_path(const ModelSpec& model, const Grid& grid, double init,
                                         std::size_t n_steps, std::uint64_t seed) {
  return simulate_path(ChainSampler(model, grid), init, n_steps, seed);
}

/// Normalized unit-occupancy counts over `units` units (default: chain units).
inline PiecewiseUniformMeasure empirical_histogram(const std::vector<double>& sizes, const Grid& grid,
                                                   std::size_t units = 0) {
  if (sizes.empty()) throw DomainError("histogram of an empty sample");
  if (units == 0) units = grid.chain_units();
  std::vector<double> counts(units, 0.0);
  for (double s : sizes) {
    const auto k = grid.unit_of(s);
    if (k > units) {
      std::ostringstream os;
      os << "sample " << s << " lies beyond the last histogram unit (" << grid.unit_right(units) << ")";
      throw DomainError(os.str());
    }
    counts[k - 1] += 1.0;
  }
  const double n = static_cast<double>(sizes.size());
  for (auto& c : counts) c /= n;
  return {grid, std::move(counts)};
}

inline void write_trajectory_csv(const std::vector<double>& path, const std::string& file) {
  auto out = csv::open_for_write(file);
  out << "step,size\n";
  for (std::size_t n = 0; n < path.size(); ++n) out << n << ',' << csv::number(path[n]) << '\n';
  csv::finish(out, file);
}

}  // namespace gfchain

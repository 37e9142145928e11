#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gfchain/error.hpp"
#include "gfchain/grid.hpp"
#include "gfchain/quadrature.hpp"

namespace gfchain {

/// The four rate ratios S = B/g used throughout the numerical study.
enum class Builtin {
  example1,  // g = x, B = x^2:            S(x) = x
  example2,  // g = x, B = max(x, x^2):    S(x) = max(x, x^2)/x
  example3,  // g = x, B = x^2 + 1{x>1}:   S(x) = x + 1{x>1}/x
  example4,  // g = x, B = 1 + x:          S(x) = 1 + 1/x, singular at 0
};

inline std::string to_string(Builtin b) {
  switch (b) {
    case Builtin::example1: return "example1";
    case Builtin::example2: return "example2";
    case Builtin::example3: return "example3";
    case Builtin::example4: return "example4";
  }
  return "unknown";
}

inline std::optional<Builtin> parse_builtin(const std::string& name) {
  for (auto b : {Builtin::example1, Builtin::example2, Builtin::example3, Builtin::example4}) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

/// Declared polynomial growth m x^{alpha-1} <= S(x) <= M x^{alpha-1} for x >= x0.
struct GrowthParams {
  double m;
  double M;
  double alpha;
  double x0;

  /// Multiplicative constant of the drift bound PV(x) <= C1 V(x) exp(-C2 (x/2)^alpha).
  double c1() const { return std::pow(2.0, alpha) * M / ((std::pow(2.0, alpha) - 1.0) * m); }
  /// Exponential rate of the drift bound.
  double c2() const { return m / alpha * (std::pow(2.0, alpha) - 1.0); }
};

/// Rate ratio S(x) = B(x)/g(x), closed-form or tabulated at grid points.
///
/// Tabulated models answer only at the abscissae they were given; any other
/// query is an EvaluationError.
class ModelSpec {
 public:
  using RateFn = std::function<double(double)>;

  static ModelSpec builtin(Builtin which) {
    RateFn fn;
    bool bounded = true;
    switch (which) {
      case Builtin::example1:
        fn = [](double x) { return x; };
        break;
      case Builtin::example2:
        fn = [](double x) { return std::max(x, x * x) / x; };
        break;
      case Builtin::example3:
        fn = [](double x) { return x + (x > 1.0 ? 1.0 / x : 0.0); };
        break;
      case Builtin::example4:
        fn = [](double x) { return 1.0 + 1.0 / x; };
        bounded = false;
        break;
    }
    return ModelSpec(to_string(which), std::move(fn), bounded);
  }

  /// Closed-form model. `bounded_near_zero` must be false when S is not
  /// integrable at the origin; the Lyapunov function is then unavailable.
  static ModelSpec from_function(std::string tag, RateFn fn, bool bounded_near_zero = true) {
    return ModelSpec(std::move(tag), std::move(fn), bounded_near_zero);
  }

  static ModelSpec tabulated(std::vector<double> xs, std::vector<double> values,
                             std::string tag = "table") {
    if (xs.size() != values.size() || xs.empty()) {
      throw ConfigError("rate table needs matching, nonempty x and s columns");
    }
    std::vector<std::size_t> order(xs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto l, auto r) { return xs[l] < xs[r]; });
    auto table = std::make_shared<Table>();
    for (auto k : order) {
      if (!std::isfinite(xs[k])) throw ConfigError("rate table contains a non-finite abscissa");
      table->xs.push_back(xs[k]);
      table->values.push_back(values[k]);
    }
    ModelSpec spec(std::move(tag), RateFn{}, true);
    spec.table_ = std::move(table);
    return spec;
  }

  /// Attaches growth constants after checking them on a lattice of sizes above x0.
  ModelSpec with_growth(const GrowthParams& g) const {
    if (!(g.m > 0.0 && g.M >= g.m && g.alpha > 0.0 && g.x0 >= 0.0)) {
      throw ConfigError("growth constants need 0 < m <= M, alpha > 0, X0 >= 0");
    }
    std::vector<double> lattice;
    if (table_) {
      for (double x : table_->xs) {
        if (x > g.x0) lattice.push_back(x);
      }
    } else {
      for (double d = 1e-2; d <= 100.0; d *= 1.1) lattice.push_back(g.x0 + d);
    }
    if (!satisfies(g, lattice)) {
      throw ConfigError("declared growth constants are violated by S of model '" + tag_ + "'");
    }
    ModelSpec out = *this;
    out.growth_ = g;
    return out;
  }

  /// Whether m x^{alpha-1} <= S(x) <= M x^{alpha-1} at every lattice point above x0.
  bool satisfies(const GrowthParams& g, const std::vector<double>& lattice) const {
    for (double x : lattice) {
      if (x <= g.x0) continue;
      const double s = rate(x);
      const double p = std::pow(x, g.alpha - 1.0);
      const double slack = 1e-12 * std::max(1.0, s);
      if (s < g.m * p - slack || s > g.M * p + slack) return false;
    }
    return true;
  }

  const std::string& tag() const noexcept { return tag_; }
  bool tabulated() const noexcept { return static_cast<bool>(table_); }
  bool bounded_near_zero() const noexcept { return bounded_near_zero_; }
  const std::optional<GrowthParams>& growth() const noexcept { return growth_; }

  /// S(x) for x > 0. Throws EvaluationError for non-finite or negative values
  /// and for off-table queries.
  double rate(double x) const {
    double s = 0.0;
    if (table_) {
      s = table_->lookup(x);
    } else {
      s = fn_(x);
    }
    if (!std::isfinite(s) || s < 0.0) {
      std::ostringstream os;
      os << "rate ratio S is " << s << " at x=" << x;
      throw EvaluationError(os.str());
    }
    return s;
  }

  /// Tabulated abscissae (empty for closed-form models).
  std::vector<double> table_points() const { return table_ ? table_->xs : std::vector<double>{}; }

 private:
  struct Table {
    std::vector<double> xs;
    std::vector<double> values;

    double lookup(double x) const {
      auto it = std::lower_bound(xs.begin(), xs.end(), x);
      const double tol = 1e-12 * std::max(1.0, std::abs(x));
      for (auto cand : {it, it == xs.begin() ? it : std::prev(it)}) {
        if (cand != xs.end() && std::abs(*cand - x) <= tol) {
          return values[static_cast<std::size_t>(cand - xs.begin())];
        }
      }
      std::ostringstream os;
      os << "tabulated rate ratio has no value at x=" << x;
      throw EvaluationError(os.str());
    }
  };

  ModelSpec(std::string tag, RateFn fn, bool bounded)
      : tag_(std::move(tag)), fn_(std::move(fn)), bounded_near_zero_(bounded) {}

  std::string tag_;
  RateFn fn_;
  std::shared_ptr<const Table> table_;
  bool bounded_near_zero_ = true;
  std::optional<GrowthParams> growth_;
};

/// Right-endpoint cumulative sums P[k] = h * sum_{j=1..k} S(x_j), k = 0..n_x.
/// S is never evaluated at x_0 = 0.
inline std::vector<double> prefix_integral(const ModelSpec& model, const Grid& grid) {
  std::vector<double> prefix(grid.n_x() + 1, 0.0);
  double sum = 0.0;
  for (std::size_t j = 1; j <= grid.n_x(); ++j) {
    const double x = grid.point(j);
    double s = 0.0;
    try {
      s = model.rate(x);
    } catch (const EvaluationError& e) {
      std::ostringstream os;
      os << "grid point x_" << j << "=" << x << ": " << e.what();
      throw EvaluationError(os.str());
    }
    sum += s;
    prefix[j] = grid.h() * sum;
  }
  return prefix;
}

/// Integral of S over [lo, hi] by the composite midpoint rule.
inline double integrate_rate(const ModelSpec& model, double lo, double hi, double quad_step) {
  if (!(quad_step > 0.0)) throw DomainError("quadrature step must be positive");
  return quadrature::midpoint([&](double t) { return model.rate(t); }, lo, hi, quad_step);
}

namespace detail {

inline void require_lyapunov(const ModelSpec& model) {
  if (!model.bounded_near_zero()) {
    throw EvaluationError("Lyapunov function unavailable: S of model '" + model.tag() +
                          "' is not integrable at 0");
  }
}

// Antiderivative F(t) = int_0^t S by the midpoint rule on the fixed lattice
// t_k = k*step; the last partial cell uses its own midpoint. F is continuous
// in t, which the adaptive outer quadrature relies on. Cell sums are cached
// and extended on demand.
class RateAntiderivative {
 public:
  RateAntiderivative(const ModelSpec& model, double step) : model_(model), step_(step), cum_{0.0} {
    if (!(step > 0.0)) throw DomainError("quadrature step must be positive");
  }

  double operator()(double t) {
    const auto k = static_cast<std::size_t>(std::floor(t / step_));
    while (cum_.size() <= k) {
      const double mid = (static_cast<double>(cum_.size() - 1) + 0.5) * step_;
      cum_.push_back(cum_.back() + step_ * model_.rate(mid));
    }
    const double left = static_cast<double>(k) * step_;
    const double rest = t - left;
    return rest > 0.0 ? cum_[k] + rest * model_.rate(left + 0.5 * rest) : cum_[k];
  }

 private:
  const ModelSpec& model_;
  double step_;
  std::vector<double> cum_;
};

}  // namespace detail

/// V(x) = exp(int_0^x S).
inline double lyapunov_v(const ModelSpec& model, double x, double quad_step) {
  if (x < 0.0) throw DomainError("Lyapunov function needs x >= 0");
  detail::require_lyapunov(model);
  return std::exp(integrate_rate(model, 0.0, x, quad_step));
}

/// P(next size > y | size = x) = exp(-int_x^{2y} S), defined for y >= x/2.
inline double tail_probability(const ModelSpec& model, double x, double y, double quad_step) {
  if (y < 0.5 * x) {
    std::ostringstream os;
    os << "tail probability needs y >= x/2, got x=" << x << " y=" << y;
    throw DomainError(os.str());
  }
  return std::exp(-integrate_rate(model, x, 2.0 * y, quad_step));
}

/// Transition density p(x,y) = 1{y >= x/2} 2 S(2y) exp(-int_x^{2y} S) of the
/// next birth size y. The factor 2 is the Jacobian of y = (division size)/2.
inline double density_p(const ModelSpec& model, double x, double y, double quad_step) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("density needs x > 0 and y > 0");
  if (y < 0.5 * x) return 0.0;
  const double s = model.rate(2.0 * y);
  if (s == 0.0) return 0.0;
  return 2.0 * s * std::exp(-integrate_rate(model, x, 2.0 * y, quad_step));
}

/// int_{x'}^inf p(x,y) V(y) dy, truncated once panels stop contributing.
inline double tail_pv(const ModelSpec& model, double x, double x_prime, double quad_step) {
  if (!(x > 0.0)) throw DomainError("tail integral needs x > 0");
  detail::require_lyapunov(model);
  detail::RateAntiderivative big_s(model, quad_step);
  const double lower = std::max(x_prime, 0.5 * x);
  const double from_x = big_s(x);
  // p(x,y) V(y) = 2 S(2y) exp(F(y) - (F(2y) - F(x)))
  auto integrand = [&](double y) {
    const double s = model.rate(2.0 * y);
    if (s == 0.0) return 0.0;
    return 2.0 * s * std::exp(big_s(y) - (big_s(2.0 * y) - from_x));
  };
  const double panel = std::max(0.125, 0.25 * lower);
  return quadrature::to_infinity(integrand, lower, panel);
}

/// (PV)(x) = int_{x/2}^inf p(x,y) V(y) dy.
inline double continuous_pv(const ModelSpec& model, double x, double quad_step) {
  return tail_pv(model, x, 0.5 * x, quad_step);
}

}  // namespace gfchain

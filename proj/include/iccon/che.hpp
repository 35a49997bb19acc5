#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iccon/errors.hpp"

namespace iccon {

/// Parameters of one Che's-approximation evaluation. `aggregation` is the
/// number of UEs whose requests share the cache, so item i sees rate
/// q_i = aggregation * request_rate * p_i.
struct CheInput {
  std::size_t catalogue_size = 0;  // C
  double slope = 0.0;              // s
  std::size_t cache_size = 0;      // c, in items
  double aggregation = 1.0;        // alpha
  double request_rate = 0.0;       // lambda_c, requests/second per UE

  void validate() const {
    if (catalogue_size < 2) throw ConfigError("che: catalogue size must be at least 2");
    if (slope < 0.0) throw ConfigError("che: slope must be non-negative");
    if (cache_size == 0) throw ConfigError("che: cache size must be positive");
    if (cache_size >= catalogue_size)
      throw ConfigError("che: cache size must be smaller than the catalogue");
    if (aggregation < 1.0) throw ConfigError("che: aggregation level must be at least 1");
    if (request_rate <= 0.0) throw ConfigError("che: request rate must be positive");
  }
};

struct CheSolution {
  double tau = 0.0;  // characteristic time, seconds
  double r = 0.0;    // tau * lambda_c
  double chr = 0.0;  // predicted cache hit ratio
};

/// Bisection for a strictly increasing g with g(lo) <= 0 <= g(hi). Stops
/// once |g(mid)| <= g_tol and the bracket is narrower than rel_tol
/// relative to the midpoint. The observer, when given, sees every bracket.
template <typename Fn, typename Observer>
double bisect_increasing(Fn&& g, double lo, double hi, double g_tol, double rel_tol,
                         Observer&& observe) {
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    observe(lo, hi);
    mid = 0.5 * (lo + hi);
    const double value = g(mid);
    if (value < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(value) <= g_tol && (hi - lo) <= rel_tol * std::abs(mid)) break;
    if (hi - lo <= 0.0) break;
  }
  return 0.5 * (lo + hi);
}

template <typename Fn>
double bisect_increasing(Fn&& g, double lo, double hi, double g_tol, double rel_tol) {
  return bisect_increasing(static_cast<Fn&&>(g), lo, hi, g_tol, rel_tol, [](double, double) {});
}

/// Solver for the characteristic time fixed point
///     sum_i (1 - e^{-q_i tau}) = c,  q_i = alpha * lambda_c * p_i,
/// with p the Zipf(s) popularity over the catalogue. Popularity weights are
/// precomputed once so sweeps reuse them across cells.
class CheSolver {
 public:
  CheSolver(std::size_t catalogue_size, double slope) {
    if (catalogue_size == 0) throw ConfigError("che: catalogue size must be at least 1");
    if (slope < 0.0) throw ConfigError("che: slope must be non-negative");
    probs_.resize(catalogue_size);
    prefix_mass_.resize(catalogue_size);
    long double norm = 0.0L;
    for (std::size_t i = 1; i <= catalogue_size; ++i)
      norm += std::pow(static_cast<double>(i), -slope);
    long double acc = 0.0L;
    for (std::size_t i = 1; i <= catalogue_size; ++i) {
      probs_[i - 1] = static_cast<double>(std::pow(static_cast<double>(i), -slope) / norm);
      acc += probs_[i - 1];
      prefix_mass_[i - 1] = static_cast<double>(acc);
    }
  }

  std::size_t catalogue_size() const { return probs_.size(); }

  /// Expected number of cached items at characteristic time tau:
  /// sum_i (1 - e^{-q_i tau}).
  double occupancy(double tau, double aggregation, double rate) const {
    const double scale = aggregation * rate * tau;
    // Ranks with q_i*tau beyond ~37 contribute exactly 1.0 in double
    // precision; probs_ is non-increasing, so they form a prefix.
    const std::size_t head = saturated_prefix(scale);
    long double acc = static_cast<long double>(head);
    for (std::size_t i = head; i < probs_.size(); ++i) {
      acc += -std::expm1(-probs_[i] * scale);
    }
    return static_cast<double>(acc);
  }

  /// Characteristic time for the given cell; the unique root of
  /// occupancy(tau) - c. |g| is driven below 1e-9 * c and the bracket
  /// below 1e-10 relative.
  double characteristic_time(const CheInput& input) const {
    return characteristic_time(input, [](double, double) {});
  }

  template <typename Observer>
  double characteristic_time(const CheInput& input, Observer&& observe) const {
    input.validate();
    if (input.catalogue_size != probs_.size())
      throw ConfigError("che: input catalogue size does not match the solver");
    const double c = static_cast<double>(input.cache_size);
    const auto g = [&](double tau) {
      return occupancy(tau, input.aggregation, input.request_rate) - c;
    };
    double hi = 1.0 / (input.aggregation * input.request_rate);
    int doublings = 0;
    while (g(hi) <= 0.0) {
      hi *= 2.0;
      if (++doublings > 400) throw RuntimeError("che: failed to bracket the root");
    }
    return bisect_increasing(g, 0.0, hi, 1e-9 * c, 1e-10,
                             static_cast<Observer&&>(observe));
  }

  /// Predicted hit ratio sum_i p_i (1 - e^{-q_i tau}) for a tau that solves
  /// the fixed point.
  double predicted_chr(const CheInput& input, double tau) const {
    input.validate();
    if (input.catalogue_size != probs_.size())
      throw ConfigError("che: input catalogue size does not match the solver");
    const double scale = input.aggregation * input.request_rate * tau;
    const std::size_t head = saturated_prefix(scale);
    long double acc = head > 0 ? static_cast<long double>(prefix_mass_[head - 1]) : 0.0L;
    for (std::size_t i = head; i < probs_.size(); ++i) {
      acc += probs_[i] * -std::expm1(-probs_[i] * scale);
    }
    return static_cast<double>(acc);
  }

  CheSolution solve(const CheInput& input) const {
    const double tau = characteristic_time(input);
    return CheSolution{tau, tau * input.request_rate, predicted_chr(input, tau)};
  }

 private:
  /// Number of leading ranks with p_i * scale >= 37.5 (where 1 - e^{-x}
  /// rounds to exactly 1.0).
  std::size_t saturated_prefix(double scale) const {
    if (scale <= 0.0) return 0;
    std::size_t lo = 0, hi = probs_.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (probs_[mid] * scale >= 37.5) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  std::vector<double> probs_;
  std::vector<double> prefix_mass_;
};

inline double characteristic_time(const CheInput& input) {
  return CheSolver(input.catalogue_size, input.slope).characteristic_time(input);
}

/// r = tau * lambda_c; profile matches are actionable when r exceeds 1.
inline double r_value(double tau, double request_rate) {
  if (tau <= 0.0 || request_rate <= 0.0)
    throw ConfigError("r_value: tau and request rate must be positive");
  return tau * request_rate;
}

inline double predicted_chr(const CheInput& input, double tau) {
  return CheSolver(input.catalogue_size, input.slope).predicted_chr(input, tau);
}

inline CheSolution solve_che(const CheInput& input) {
  return CheSolver(input.catalogue_size, input.slope).solve(input);
}

/// One sweep cell. `solution` is absent when the cell's parameters are
/// invalid (e.g. the cache would not be smaller than the catalogue); the
/// error text says why.
struct CheSweepCell {
  double aggregation = 0.0;
  double c_ratio = 0.0;
  std::size_t cache_size = 0;
  std::optional<CheSolution> solution;
  std::string error;
};

/// Fixed sweep parameters: catalogue, slope, and per-UE request rate.
struct CheSweepBase {
  std::size_t catalogue_size = 0;
  double slope = 0.0;
  double request_rate = 0.0;
};

/// Evaluates every (alpha, c_ratio) pair in input order. Cache sizes are
/// floor(ratio * C), at least 1 item. Invalid cells are marked, not fatal.
inline std::vector<CheSweepCell> che_sweep(std::span<const double> alphas,
                                           std::span<const double> c_ratios,
                                           const CheSweepBase& base) {
  if (base.catalogue_size == 0) throw ConfigError("che sweep: catalogue size must be positive");
  if (base.request_rate <= 0.0) throw ConfigError("che sweep: request rate must be positive");
  const CheSolver solver(base.catalogue_size, base.slope);
  std::vector<CheSweepCell> cells;
  cells.reserve(alphas.size() * c_ratios.size());
  for (double alpha : alphas) {
    for (double ratio : c_ratios) {
      CheSweepCell cell;
      cell.aggregation = alpha;
      cell.c_ratio = ratio;
      const double items = std::floor(ratio * static_cast<double>(base.catalogue_size));
      cell.cache_size = items < 1.0 ? 1 : static_cast<std::size_t>(items);
      try {
        const CheInput input{base.catalogue_size, base.slope, cell.cache_size, alpha,
                             base.request_rate};
        cell.solution = solver.solve(input);
      } catch (const ConfigError& err) {
        cell.error = err.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace iccon

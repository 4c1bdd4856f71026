#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pasafl/core_types.hpp"
#include "pasafl/rng.hpp"

namespace pasafl {

inline constexpr double kDefaultReputationFloor = 1e-3;

enum class ArrivalMode {
  Poisson,        // integer draw with mean equal to the expectation
  Deterministic,  // round-half-up of the expectation, no randomness
};

struct DemandModel {
  double reputation_floor = kDefaultReputationFloor;
  ArrivalMode arrivals = ArrivalMode::Poisson;
};

/// Demand multiplier exp(a0 + a3*eps) * Mp^a2, with 0^0 taken as 1.
inline double zeta(const MarketConstants& c, double alignment, double positive_ratings) {
  if (positive_ratings < 0.0) throw std::invalid_argument("zeta: positive_ratings must be >= 0");
  const double base = std::exp(c.a0 + c.a3 * alignment);
  if (positive_ratings == 0.0) return c.a2 == 0.0 ? base : 0.0;
  return base * std::pow(positive_ratings, c.a2);
}

/// Expected number of task offers, zeta * p / r^a1. Reputation is floored
/// because the expression is singular at r = 0.
inline double expected_demand(double price, double reputation, double zeta_value, double a1,
                              double reputation_floor = kDefaultReputationFloor) {
  if (!(price >= 0.0)) throw std::invalid_argument("expected_demand: negative price");
  if (!(zeta_value >= 0.0)) throw std::invalid_argument("expected_demand: negative zeta");
  const double r = std::max(reputation, reputation_floor);
  return zeta_value * price / std::pow(r, a1);
}

/// Integer arrivals with the given mean, clamped to [0, cap - 1] since an
/// owner can take strictly fewer than its cap in one auction.
inline int realize_demand(double expected, int cap, Rng& rng, ArrivalMode mode = ArrivalMode::Poisson) {
  if (!(expected >= 0.0)) throw std::invalid_argument("realize_demand: negative expectation");
  if (cap < 1) throw std::invalid_argument("realize_demand: cap must be >= 1");
  const long long hi = cap - 1;
  if (expected == 0.0 || hi == 0) return 0;
  long long draw = 0;
  if (mode == ArrivalMode::Deterministic) {
    draw = static_cast<long long>(std::floor(expected + 0.5));
  } else {
    // Large means cannot change the clamped outcome; keep the draw cheap.
    const double mean = std::min(expected, 1e9);
    draw = std::poisson_distribution<long long>(mean)(rng);
  }
  return static_cast<int>(std::clamp<long long>(draw, 0, hi));
}

}  // namespace pasafl

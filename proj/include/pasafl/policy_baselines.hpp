#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pasafl/core_types.hpp"
#include "pasafl/policy_pas.hpp"
#include "pasafl/rng.hpp"

namespace pasafl {

struct BaselineParams {
  double markup_max = 1.0; // Ampp: p_min * (1 + U(0, markup_max))
  double lin_gain = 1.5;   // Lin: lin_gain * p_min
  // Rand: U(p_min, p_cap) with p_cap = multiplier * p_min. Unset means
  // 2 * (1 + markup_max), which lines the Rand support up with Ampp and Lin.
  std::optional<double> rand_cap_multiplier;

  double rand_cap(double p_min) const {
    const double m = rand_cap_multiplier.value_or(2.0 * (1.0 + markup_max));
    return std::max(p_min, m * p_min);
  }
};

inline double price_rand(const DataOwnerState& s, const BaselineParams& p, Rng& rng) {
  return uniform(rng, s.reserve_price, p.rand_cap(s.reserve_price));
}

inline double price_ampp(const DataOwnerState& s, const BaselineParams& p, Rng& rng) {
  return s.reserve_price * (1.0 + uniform(rng, 0.0, p.markup_max));
}

inline double price_lin(const DataOwnerState& s, const BaselineParams& p) { return p.lin_gain * s.reserve_price; }

/// Coin flip for whether to delegate, then a uniform amount.
inline int subdel_rand(const DataOwnerState& s, const DelegationContext& ctx, int theta, Rng& rng) {
  const int upper = delegable_tasks(s, theta);
  if (ctx.eligible.empty() || upper <= 0) return 0;
  if (uniform01(rng) < 0.5) return 0;
  return uniform_int(rng, 0, upper);
}

inline int subdel_greedy(const DataOwnerState& s, const DelegationContext& ctx, int theta) {
  if (ctx.eligible.empty()) return 0;
  return delegable_tasks(s, theta);
}

}  // namespace pasafl

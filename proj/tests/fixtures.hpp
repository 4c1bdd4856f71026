#pragma once

// Random owner states and delegation contexts shared by the unit and
// acceptance suites.

#include <random>

#include "pasafl/core_types.hpp"
#include "pasafl/policy_pas.hpp"

namespace fixtures {

struct PolicyCase {
  pasafl::DataOwnerState state;
  pasafl::DelegationContext ctx;
  int theta = 0;
};

/// A valid state with a random neighbourhood summary. About a quarter of the
/// cases have nobody eligible, and queues are zero often enough to hit the
/// boundary branches.
inline PolicyCase random_policy_case(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PolicyCase c;
  auto& s = c.state;
  s.reputation = 0.05 + 0.95 * u(g);
  s.rep_threshold = u(g);
  s.pending = g() % 5 == 0 ? 0.0 : 25.0 * u(g);
  s.urgency = g() % 5 == 0 ? 0.0 : 40.0 * u(g);
  s.avg_demand = 4.0 * u(g);
  s.availability = 0.1 + 8.0 * u(g);
  s.unit_cost = u(g);
  s.reserve_price = 0.2 + 2.0 * u(g);
  s.theta_max = static_cast<int>(g() % 7);
  s.s_max = static_cast<int>(g() % 5);
  s.kappa_max = 1 + static_cast<int>(g() % 10);
  s.work_capacity = static_cast<int>(g() % (s.theta_max + 1));
  s.alignment = u(g);
  s.positive_ratings = static_cast<std::int64_t>(g() % 50);
  s.data_size = 1000 + static_cast<std::int64_t>(g() % 9001);

  c.ctx.avg_neighbor_price = 0.2 + 3.0 * u(g);
  if (g() % 4 != 0) {
    const int k = 1 + static_cast<int>(g() % 4);
    for (int i = 0; i < k; ++i)
      c.ctx.eligible.push_back({static_cast<pasafl::DoId>(i + 1), 0.2 + 2.0 * u(g), s.rep_threshold});
    std::sort(c.ctx.eligible.begin(), c.ctx.eligible.end(),
              [](const auto& a, const auto& b) { return a.price < b.price; });
    c.ctx.cheapest_eligible_price = c.ctx.eligible.front().price;
  }
  c.theta = pasafl::decide_work(s);
  return c;
}

}  // namespace fixtures

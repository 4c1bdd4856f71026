#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pasafl/core_types.hpp"
#include "pasafl/demand.hpp"

namespace pasafl {

struct DelegateCandidate {
  DoId id = 0;
  double price = 0.0;
  double reputation = 0.0;

  bool operator==(const DelegateCandidate&) const = default;
};

/// What an owner sees of its trust neighbourhood when deciding.
struct DelegationContext {
  // Mean posted neighbour price; +inf when the owner has no neighbours.
  double avg_neighbor_price = std::numeric_limits<double>::infinity();
  std::vector<DelegateCandidate> eligible; // cheapest first, then by id
  std::optional<double> cheapest_eligible_price;
};

/// Neighbours k with r_k >= r_min and p_k <= reference_payment, cheapest
/// first (ties by id). `states` is indexed by owner id.
inline std::vector<DelegateCandidate> eligible_delegates(const TrustNetwork& network, DoId id,
                                                         std::span<const DataOwnerState> states,
                                                         double reference_payment, double r_min) {
  std::vector<DelegateCandidate> out;
  for (DoId k : network.neighbors(id)) {
    const auto& nb = states[k];
    if (nb.reputation >= r_min && nb.price <= reference_payment) out.push_back({k, nb.price, nb.reputation});
  }
  std::sort(out.begin(), out.end(), [](const DelegateCandidate& a, const DelegateCandidate& b) {
    return a.price != b.price ? a.price < b.price : a.id < b.id;
  });
  return out;
}

inline DelegationContext make_delegation_context(const TrustNetwork& network, DoId id,
                                                 std::span<const DataOwnerState> states,
                                                 double reference_payment) {
  DelegationContext ctx;
  const auto& nbrs = network.neighbors(id);
  if (!nbrs.empty()) {
    double sum = 0.0;
    for (DoId k : nbrs) sum += states[k].price;
    ctx.avg_neighbor_price = sum / static_cast<double>(nbrs.size());
  }
  ctx.eligible = eligible_delegates(network, id, states, reference_payment, states[id].rep_threshold);
  if (!ctx.eligible.empty()) ctx.cheapest_eligible_price = ctx.eligible.front().price;
  return ctx;
}

/// Tasks that could leave this step: floor(q) - theta, capped by s_max.
inline int delegable_tasks(const DataOwnerState& s, int theta) {
  const int stock = static_cast<int>(std::floor(s.pending)) - theta;
  return std::clamp(std::min(stock, s.s_max), 0, std::max(s.s_max, 0));
}

/// Delegate everything not being worked on once rho * pbar < q + Q, provided
/// somebody eligible exists.
inline int decide_subdelegation(const DataOwnerState& s, const DelegationContext& ctx, int theta) {
  if (ctx.eligible.empty() || !std::isfinite(ctx.avg_neighbor_price)) return 0;
  if (s.availability * ctx.avg_neighbor_price - s.pending - s.urgency >= 0.0) return 0;
  return delegable_tasks(s, theta);
}

struct PriceDecision {
  double price = 0.0;
  bool degenerate = false;
};

/// max(p_min, q / (2 rho r)). Falls back to p_min (flagged) when rho == 0 or
/// r is under the floor, where the quotient has no finite value.
inline PriceDecision decide_price(const DataOwnerState& s,
                                  double reputation_floor = kDefaultReputationFloor) {
  if (!(s.availability > 0.0) || s.reputation < reputation_floor) return {s.reserve_price, true};
  const double stationary = s.pending / (2.0 * s.availability * s.reputation);
  return {std::max(s.reserve_price, stationary), false};
}

inline bool decide_acceptance(const DataOwnerState& s, double price) {
  return s.availability * price * s.reputation - s.pending > 0.0;
}

enum class WorkMode {
  Greedy,    // work as much as capacity allows
  Threshold, // work only while rho * c < q + Q
};

inline int decide_work(const DataOwnerState& s, WorkMode mode = WorkMode::Greedy) {
  const int stock = std::max(0, static_cast<int>(std::floor(s.pending)));
  const int greedy = std::min(stock, s.work_capacity);
  if (mode == WorkMode::Threshold && s.availability * s.unit_cost - s.pending - s.urgency >= 0.0) return 0;
  return greedy;
}

/// Upper bound on new tasks admitted in one step: theta_max and kappa_max - 1.
inline int admission_limit(const DataOwnerState& s) { return std::max(0, std::min(s.theta_max, s.kappa_max - 1)); }

struct PasOptions {
  WorkMode work_mode = WorkMode::Greedy;
  double reputation_floor = kDefaultReputationFloor;
};

/// work -> sub-delegation -> price -> acceptance.
inline StepDecision decide_joint(const DataOwnerState& s, const DelegationContext& ctx,
                                 const PasOptions& opt = {}) {
  StepDecision d;
  d.work = decide_work(s, opt.work_mode);
  d.subdelegate = decide_subdelegation(s, ctx, d.work);
  const auto priced = decide_price(s, opt.reputation_floor);
  d.price = priced.price;
  d.price_degenerate = priced.degenerate;
  d.accept = decide_acceptance(s, d.price);
  d.admission_cap = d.accept ? admission_limit(s) : 0;
  return d;
}

}  // namespace pasafl

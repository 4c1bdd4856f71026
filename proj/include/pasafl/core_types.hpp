#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pasafl {

using DoId = std::uint32_t;
using MuId = std::uint32_t;
using TaskId = std::uint64_t;
using Step = std::int64_t;

/// Outcome of an invariant check. `field` names the first violated invariant.
struct ValidationResult {
  bool ok = true;
  std::string field;

  static ValidationResult success() { return {}; }
  static ValidationResult failure(std::string name) { return {false, std::move(name)}; }

  explicit operator bool() const noexcept { return ok; }
};

/// Demand-model coefficients shared by every data owner, plus the run horizon.
struct MarketConstants {
  double a0 = 0.0;
  double a1 = 1.0;
  double a2 = 0.0;
  double a3 = 0.0;
  std::int64_t horizon_T = 1;
};

inline ValidationResult validate_constants(const MarketConstants& c) {
  if (!std::isfinite(c.a0) || c.a0 < 0.0) return ValidationResult::failure("a0");
  if (!std::isfinite(c.a1) || c.a1 <= 0.0) return ValidationResult::failure("a1");
  if (!std::isfinite(c.a2) || c.a2 < 0.0) return ValidationResult::failure("a2");
  if (!std::isfinite(c.a3) || c.a3 < 0.0) return ValidationResult::failure("a3");
  if (c.horizon_T < 1) return ValidationResult::failure("horizon_T");
  return ValidationResult::success();
}

/// Everything one data owner knows about itself at the start of a step.
///
/// `pending` and `urgency` are real-valued virtual queues. Physical task
/// movements (work, sub-delegation, admissions) are integer counts.
/// `work_capacity` is the part of `theta_max` usable this step given the
/// owner's current availability; it is refreshed by the market each step.
struct DataOwnerState {
  DoId id = 0;
  double reputation = 1.0;
  double pending = 0.0;      // q
  double urgency = 0.0;      // Q
  double avg_demand = 0.0;   // causal running mean of admitted tasks per step
  double availability = 1.0; // rho
  double unit_cost = 0.0;
  double reserve_price = 1.0;
  double rep_threshold = 0.0;
  int theta_max = 0;
  int s_max = 0;
  int kappa_max = 1;
  int work_capacity = 0;
  double alignment = 0.0; // epsilon
  std::int64_t positive_ratings = 0;
  double price = 0.0; // last posted price; 0 means "not yet priced"
  std::int64_t data_size = 1000;

  bool operator==(const DataOwnerState&) const = default;
};

inline ValidationResult validate_state(const DataOwnerState& s) {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };

  if (!in_unit(s.reputation)) return ValidationResult::failure("reputation_r");
  if (!in_unit(s.rep_threshold)) return ValidationResult::failure("rep_threshold_r_min");
  if (!nonneg(s.pending)) return ValidationResult::failure("pending_q");
  if (!nonneg(s.urgency)) return ValidationResult::failure("urgency_Q");
  if (!nonneg(s.avg_demand)) return ValidationResult::failure("avg_demand_kappa_bar");
  if (!nonneg(s.availability)) return ValidationResult::failure("availability_rho");
  if (!nonneg(s.unit_cost)) return ValidationResult::failure("unit_cost_c");
  if (!std::isfinite(s.reserve_price) || s.reserve_price <= 0.0)
    return ValidationResult::failure("reserve_price_p_min");
  if (s.theta_max < 0) return ValidationResult::failure("theta_max");
  if (s.s_max < 0) return ValidationResult::failure("s_max");
  if (s.kappa_max < 1) return ValidationResult::failure("kappa_max");
  if (s.work_capacity < 0 || s.work_capacity > s.theta_max)
    return ValidationResult::failure("work_capacity");
  if (!nonneg(s.alignment)) return ValidationResult::failure("alignment_epsilon");
  if (s.positive_ratings < 0) return ValidationResult::failure("positive_ratings_Mp");
  if (!nonneg(s.price) || (s.price != 0.0 && s.price < s.reserve_price))
    return ValidationResult::failure("current_price_p");
  if (s.data_size < 1000 || s.data_size > 10000) return ValidationResult::failure("data_size");
  return ValidationResult::success();
}

/// One opaque unit of FL training work.
struct Task {
  TaskId id = 0;
  MuId origin_mu = 0;
  double unit_payment = 0.0; // what the current holder was paid for it
  Step arrival_step = 0;     // step at which the current holder took it on
  Step created_step = 0;
  int delegation_depth = 0;
  DoId holder = 0;

  bool operator==(const Task&) const = default;
};

/// Undirected, irreflexive trust relation. Neighbour lists stay sorted.
class TrustNetwork {
 public:
  TrustNetwork() = default;
  explicit TrustNetwork(std::size_t n) : adj_(n) {}

  std::size_t size() const noexcept { return adj_.size(); }

  void add_edge(DoId a, DoId b) {
    if (a == b) throw std::invalid_argument("TrustNetwork: self-loop");
    if (a >= adj_.size() || b >= adj_.size()) throw std::out_of_range("TrustNetwork: node id");
    if (connected(a, b)) return;
    insert_sorted(adj_[a], b);
    insert_sorted(adj_[b], a);
    ++edges_;
  }

  bool connected(DoId a, DoId b) const {
    if (a >= adj_.size()) return false;
    return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
  }

  const std::vector<DoId>& neighbors(DoId i) const { return adj_.at(i); }

  std::size_t edge_count() const noexcept { return edges_; }

 private:
  static void insert_sorted(std::vector<DoId>& v, DoId x) {
    v.insert(std::upper_bound(v.begin(), v.end(), x), x);
  }

  std::vector<std::vector<DoId>> adj_;
  std::size_t edges_ = 0;
};

/// The joint (x, p, s, theta) decision for one owner at one step.
struct StepDecision {
  bool accept = false;
  double price = 0.0;
  int subdelegate = 0;
  int work = 0;
  // Most new tasks the owner will take on this step when accept is set.
  int admission_cap = 0;
  // Set when the closed-form price had no finite value (rho = 0 or r below floor).
  bool price_degenerate = false;

  bool operator==(const StepDecision&) const = default;
};

inline ValidationResult validate_decision(const DataOwnerState& s, const StepDecision& d) {
  if (d.work < 0 || d.work > s.theta_max) return ValidationResult::failure("work_theta");
  const int delegable = std::min<int>(s.s_max, static_cast<int>(std::floor(s.pending)));
  if (d.subdelegate < 0 || d.subdelegate > delegable)
    return ValidationResult::failure("subdelegate_s");
  if (!std::isfinite(d.price) || d.price < s.reserve_price) return ValidationResult::failure("price_p");
  if (d.admission_cap < 0) return ValidationResult::failure("admission_cap");
  return ValidationResult::success();
}

/// Per-step, per-owner observables; fields echo the post-step state.
struct MetricsRecord {
  Step step = 0;
  DoId do_id = 0;
  double utility = 0.0;
  double pending = 0.0;
  double urgency = 0.0;
  int accepted = 0;
  int completed = 0;
  int subdelegated = 0;
  double price = 0.0;
  double reputation = 0.0;

  bool operator==(const MetricsRecord&) const = default;
};

}  // namespace pasafl

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pasafl/core_types.hpp"
#include "pasafl/demand.hpp"
#include "pasafl/policy.hpp"
#include "pasafl/queues.hpp"
#include "pasafl/rng.hpp"

namespace pasafl {

// ---------------------------------------------------------------------------
// Model users
// ---------------------------------------------------------------------------

enum class MuStrategy { Random, Greedy, Lin, Bmub, FedBidderSimple, FedBidderComplex };

inline std::string_view to_string(MuStrategy s) {
  switch (s) {
    case MuStrategy::Random: return "random";
    case MuStrategy::Greedy: return "greedy";
    case MuStrategy::Lin: return "lin";
    case MuStrategy::Bmub: return "bmub";
    case MuStrategy::FedBidderSimple: return "fedbidder-simple";
    case MuStrategy::FedBidderComplex: return "fedbidder-complex";
  }
  return "?";
}

inline MuStrategy parse_mu_strategy(std::string_view name) {
  for (auto s : {MuStrategy::Random, MuStrategy::Greedy, MuStrategy::Lin, MuStrategy::Bmub,
                 MuStrategy::FedBidderSimple, MuStrategy::FedBidderComplex})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown MU strategy: " + std::string(name));
}

/// A bidder. The six strategies are simplified stand-ins: random and greedy
/// bid off their private valuations, the others bid a multiple of the
/// owner's reserve price.
struct ModelUser {
  MuId id = 0;
  MuStrategy strategy = MuStrategy::Random;
  double budget_per_step = 0.0;
  double bid_gain = 1.0;
  std::vector<double> valuation; // indexed by owner id
};

inline double normalized_data_size(const DataOwnerState& s) {
  return std::clamp((static_cast<double>(s.data_size) - 1000.0) / 9000.0, 0.0, 1.0);
}

inline double mu_bid(const ModelUser& mu, const DataOwnerState& owner, double budget_left, Rng& rng) {
  const double v = mu.valuation.at(owner.id);
  const double size_factor = 0.8 + 0.4 * normalized_data_size(owner);
  const double base = mu.bid_gain * owner.reserve_price;
  switch (mu.strategy) {
    case MuStrategy::Random: return uniform(rng, 0.0, v);
    case MuStrategy::Greedy: return v;
    case MuStrategy::Lin: return base;
    case MuStrategy::Bmub: {
      const double frac = mu.budget_per_step > 0.0 ? budget_left / mu.budget_per_step : 0.0;
      return base * (0.5 + 0.5 * frac);
    }
    case MuStrategy::FedBidderSimple: return base * size_factor;
    case MuStrategy::FedBidderComplex: return base * size_factor * (0.5 + 0.5 * owner.reputation);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

struct ReputationParams {
  double ema_beta = 0.9;
  int on_time_window = 10; // steps of on-time completions counted as positive ratings
};

/// Two-state availability process: fully available, or busy with other work
/// at `busy_level` of capacity. rho = rho_scale * level.
struct AvailabilityProfile {
  double rho_scale = 1.0;
  double busy_level = 1.0;
  double p_enter_busy = 0.0;
  double p_leave_busy = 1.0;
};

struct MarketParams {
  MarketConstants constants;
  DemandModel demand;
  ReputationParams reputation;
  PolicyOptions policy;
  int max_delegation_depth = 3;
  int deadline_steps = 5;
  double kappa_bar_prior = 1.0;
};

// ---------------------------------------------------------------------------
// Trust network
// ---------------------------------------------------------------------------

/// Erdos-Renyi G(n, p): every unordered pair is linked independently.
inline TrustNetwork generate_trust_network(std::size_t n_dos, double edge_prob, Rng& rng) {
  if (n_dos < 1) throw std::invalid_argument("generate_trust_network: n_dos must be >= 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw std::invalid_argument("generate_trust_network: edge_prob outside [0, 1]");
  TrustNetwork net(n_dos);
  for (DoId i = 0; i < n_dos; ++i)
    for (DoId j = i + 1; j < n_dos; ++j)
      if (uniform01(rng) < edge_prob) net.add_edge(i, j);
  return net;
}

// ---------------------------------------------------------------------------
// Auction
// ---------------------------------------------------------------------------

struct AuctionOutcome {
  std::vector<int> kappa;                 // admitted per owner
  std::vector<std::vector<Task>> admitted; // per owner, in admission order
  std::vector<double> mu_spend;            // per MU, what it paid
  std::vector<double> do_revenue;          // per owner, what it was paid
};

/// Posted-price auction. Offers per owner follow the demand model; each offer
/// belongs to a random MU, which bids per its strategy and pays the posted
/// price if its bid clears it and its budget allows. An owner admits the best
/// bids (bid desc, MU id asc) up to its decision's admission cap.
inline AuctionOutcome run_auction(std::span<const ModelUser> mus, std::span<const DataOwnerState> owners,
                                  std::span<const StepDecision> decisions, const MarketParams& params,
                                  Step step, TaskId& next_task_id, Rng& rng) {
  const std::size_t n = owners.size();
  AuctionOutcome out;
  out.kappa.assign(n, 0);
  out.admitted.resize(n);
  out.mu_spend.assign(mus.size(), 0.0);
  out.do_revenue.assign(n, 0.0);
  if (mus.empty()) return out;

  // Offers, grouped by the MU that makes them.
  std::vector<std::vector<DoId>> offers(mus.size());
  for (DoId i = 0; i < n; ++i) {
    const auto& d = decisions[i];
    if (!d.accept || d.admission_cap <= 0) continue;
    const auto& o = owners[i];
    const double z = zeta(params.constants, o.alignment, static_cast<double>(o.positive_ratings));
    const double f = expected_demand(d.price, o.reputation, z, params.constants.a1, params.demand.reputation_floor);
    const int count = realize_demand(f, o.kappa_max, rng, params.demand.arrivals);
    for (int c = 0; c < count; ++c) offers[uniform_int(rng, 0, static_cast<int>(mus.size()) - 1)].push_back(i);
  }

  struct Request {
    double bid;
    MuId mu;
  };
  std::vector<std::vector<Request>> requests(n);
  for (std::size_t m = 0; m < mus.size(); ++m) {
    const auto& mu = mus[m];
    auto& mine = offers[m];
    if (mu.strategy == MuStrategy::Greedy) {
      auto value = [&](DoId i) { return owners[i].reputation / decisions[i].price; };
      std::stable_sort(mine.begin(), mine.end(), [&](DoId a, DoId b) {
        const double va = value(a), vb = value(b);
        return va != vb ? va > vb : a < b;
      });
    } else {
      std::shuffle(mine.begin(), mine.end(), rng);
    }
    double budget = mu.budget_per_step;
    for (DoId i : mine) {
      const double price = decisions[i].price;
      const double bid = mu_bid(mu, owners[i], budget, rng);
      if (bid >= price && budget >= price) {
        budget -= price;
        requests[i].push_back({bid, mu.id});
      }
    }
  }

  for (DoId i = 0; i < n; ++i) {
    auto& reqs = requests[i];
    std::stable_sort(reqs.begin(), reqs.end(), [](const Request& a, const Request& b) {
      return a.bid != b.bid ? a.bid > b.bid : a.mu < b.mu;
    });
    const int take = std::min<int>(decisions[i].admission_cap, static_cast<int>(reqs.size()));
    const double price = decisions[i].price;
    for (int k = 0; k < take; ++k) {
      Task t;
      t.id = next_task_id++;
      t.origin_mu = reqs[k].mu;
      t.unit_payment = price;
      t.arrival_step = step;
      t.created_step = step;
      t.delegation_depth = 0;
      t.holder = i;
      out.admitted[i].push_back(t);
      out.mu_spend[reqs[k].mu] += price;
      out.do_revenue[i] += price;
    }
    out.kappa[i] = take;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sub-delegation routing
// ---------------------------------------------------------------------------

struct Transfer {
  Task task; // as received by the delegate
  DoId from = 0;
  DoId to = 0;
  double price = 0.0;
};

/// Moves each delegator's highest-paying tasks (outside the `work` oldest it
/// keeps for itself) to the cheapest eligible neighbour with intake room.
/// A task at the depth cap is skipped; the first task with no eligible
/// delegate ends that owner's transfers. Moved tasks are erased from
/// `pending` and `room` is consumed.
inline std::vector<Transfer> route_subdelegations(std::span<const DataOwnerState> owners,
                                                  std::span<const StepDecision> decisions,
                                                  const TrustNetwork& network,
                                                  std::vector<std::deque<Task>>& pending, std::vector<int>& room,
                                                  int max_depth, Step step) {
  std::vector<Transfer> transfers;
  for (DoId i = 0; i < owners.size(); ++i) {
    const int wanted = decisions[i].subdelegate;
    if (wanted <= 0) continue;
    auto& queue = pending[i];
    const std::size_t keep = std::min<std::size_t>(queue.size(), static_cast<std::size_t>(decisions[i].work));

    std::vector<std::size_t> order(queue.size() - keep);
    std::iota(order.begin(), order.end(), keep);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ta = queue[a];
      const auto& tb = queue[b];
      return ta.unit_payment != tb.unit_payment ? ta.unit_payment > tb.unit_payment : ta.id < tb.id;
    });

    std::vector<std::size_t> moved;
    for (std::size_t idx : order) {
      if (static_cast<int>(moved.size()) >= wanted) break;
      const Task& task = queue[idx];
      if (task.delegation_depth >= max_depth) continue;
      const DoId* best = nullptr;
      for (const DoId& k : network.neighbors(i)) {
        const auto& nb = owners[k];
        if (room[k] <= 0 || nb.reputation < owners[i].rep_threshold || nb.price > task.unit_payment) continue;
        if (!best || nb.price < owners[*best].price) best = &k; // neighbours are id-sorted
      }
      if (!best) break;
      const DoId k = *best;
      Transfer tr;
      tr.task = task;
      tr.task.holder = k;
      tr.task.unit_payment = owners[k].price;
      tr.task.arrival_step = step;
      tr.task.delegation_depth = task.delegation_depth + 1;
      tr.from = i;
      tr.to = k;
      tr.price = owners[k].price;
      transfers.push_back(tr);
      --room[k];
      moved.push_back(idx);
    }
    std::sort(moved.begin(), moved.end(), std::greater<>());
    for (std::size_t idx : moved) queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return transfers;
}

// ---------------------------------------------------------------------------
// Reputation
// ---------------------------------------------------------------------------

struct ReputationUpdate {
  double reputation = 0.0;
  std::int64_t positive_ratings = 0;
};

/// EMA of the on-time ratio; positive ratings are on-time completions inside
/// the rating window (`expired` leave it this step).
inline ReputationUpdate update_reputation(const DataOwnerState& s, int completed_on_time, int due,
                                          const ReputationParams& params, int expired = 0,
                                          double reputation_floor = kDefaultReputationFloor) {
  if (completed_on_time < 0 || due < 0 || completed_on_time > due)
    throw std::invalid_argument("update_reputation: need 0 <= completed_on_time <= due");
  ReputationUpdate out{s.reputation, s.positive_ratings + completed_on_time - expired};
  if (due > 0) {
    const double ratio = static_cast<double>(completed_on_time) / due;
    out.reputation = params.ema_beta * s.reputation + (1.0 - params.ema_beta) * ratio;
  }
  out.reputation = std::clamp(out.reputation, reputation_floor, 1.0);
  out.positive_ratings = std::max<std::int64_t>(out.positive_ratings, 0);
  return out;
}

// ---------------------------------------------------------------------------
// World
// ---------------------------------------------------------------------------

struct WorldSetup {
  std::vector<DataOwnerState> owners; // owners[i].id == i
  std::vector<AvailabilityProfile> availability;
  std::vector<bool> initially_busy;
  std::vector<ModelUser> mus;
  TrustNetwork network;
  std::vector<PolicySpec> policies; // one per owner
};

struct StepAudit {
  bool tasks_conserved = true;
  bool payments_conserved = true;
  bool queues_match_tasks = true;
  bool admissions_within_cap = true;
  bool states_valid = true;
  bool decisions_valid = true;
  int drift_violations = 0;
  double max_drift_excess = -std::numeric_limits<double>::infinity();

  bool conservation_ok() const { return tasks_conserved && payments_conserved && queues_match_tasks; }
  bool all_ok() const {
    return conservation_ok() && admissions_within_cap && states_valid && decisions_valid && drift_violations == 0;
  }
};

struct LedgerTotals {
  std::int64_t tasks_created = 0;
  std::int64_t tasks_completed = 0;
  double mu_payments = 0.0;
  double do_mu_revenue = 0.0;
  double delegation_paid = 0.0;
  double delegation_received = 0.0;
};

struct StepOutcome {
  Step step = 0;
  std::vector<DataOwnerState> snapshot; // state the decisions were made against
  std::vector<StepDecision> decisions;
  std::vector<MetricsRecord> records;
  std::vector<DriftBoundParts> bounds;
  std::vector<double> realized_drift;
  std::vector<int> transferred; // actual sub-delegations per owner
  StepAudit audit;
};

inline int work_capacity_for(int theta_max, double level) {
  return std::clamp(static_cast<int>(std::lround(theta_max * level)), 0, theta_max);
}

/// The market environment. Each step runs, in order: neighbour-price
/// snapshot, decisions, auction, sub-delegation routing, work, queue
/// updates, reputation, metrics.
class World {
 public:
  World(WorldSetup setup, MarketParams params, std::uint64_t seed)
      : setup_(std::move(setup)), params_(params), seed_(seed) {
    const std::size_t n = setup_.owners.size();
    if (setup_.network.size() != n || setup_.availability.size() != n || setup_.policies.size() != n)
      throw std::invalid_argument("World: per-owner vectors differ in length");
    if (setup_.initially_busy.empty()) setup_.initially_busy.assign(n, false);
    states_ = setup_.owners;
    pending_.resize(n);
    kappa_mean_.assign(n, RunningMean(params_.kappa_bar_prior));
    ratings_.resize(n);
    busy_ = setup_.initially_busy;
    for (DoId i = 0; i < n; ++i) {
      if (states_[i].id != i) throw std::invalid_argument("World: owner ids must be 0..n-1 in order");
      apply_availability(i);
      states_[i].avg_demand = kappa_mean_[i].value();
      if (states_[i].price == 0.0) states_[i].price = states_[i].reserve_price;
      states_[i].pending = 0.0;
      states_[i].urgency = 0.0;
    }
  }

  Step current_step() const { return step_; }
  const std::vector<DataOwnerState>& states() const { return states_; }
  const std::deque<Task>& pending_tasks(DoId i) const { return pending_.at(i); }
  const TrustNetwork& network() const { return setup_.network; }
  const std::vector<ModelUser>& model_users() const { return setup_.mus; }
  const LedgerTotals& ledger() const { return ledger_; }
  const MarketParams& params() const { return params_; }

  /// Highest payment among an owner's pending tasks; the eligibility
  /// reference for its delegation context.
  std::vector<double> reference_payments() const {
    std::vector<double> out(pending_.size(), 0.0);
    for (std::size_t i = 0; i < pending_.size(); ++i)
      for (const auto& t : pending_[i]) out[i] = std::max(out[i], t.unit_payment);
    return out;
  }

  /// Decisions for `step` as a pure function of a snapshot.
  std::vector<StepDecision> compute_decisions(std::span<const DataOwnerState> snapshot,
                                              std::span<const double> reference_payment, Step step) const {
    std::vector<StepDecision> out(snapshot.size());
    for (DoId i = 0; i < snapshot.size(); ++i) {
      const auto ctx = make_delegation_context(setup_.network, i, snapshot, reference_payment[i]);
      auto rng = make_stream(seed_, StreamTag::Decision, i, static_cast<std::uint64_t>(step));
      out[i] = decide(setup_.policies[i], snapshot[i], ctx, params_.policy, rng);
    }
    return out;
  }

  StepOutcome step() {
    const std::size_t n = states_.size();
    const Step t = step_;
    StepOutcome res;
    res.step = t;
    res.snapshot = states_;
    const auto& snap = res.snapshot;

    // (1)-(2) decide against the snapshot
    res.decisions = compute_decisions(snap, reference_payments(), t);
    const auto& dec = res.decisions;
    for (DoId i = 0; i < n; ++i) {
      states_[i].price = dec[i].price;
      if (!validate_decision(snap[i], dec[i])) res.audit.decisions_valid = false;
    }

    // (3) auction against the freshly posted prices
    auto auction_rng = make_stream(seed_, StreamTag::Auction, static_cast<std::uint64_t>(t));
    auto auction = run_auction(setup_.mus, states_, dec, params_, t, next_task_id_, auction_rng);
    double mu_paid = 0.0, do_paid = 0.0;
    for (double v : auction.mu_spend) mu_paid += v;
    for (double v : auction.do_revenue) do_paid += v;
    ledger_.mu_payments += mu_paid;
    ledger_.do_mu_revenue += do_paid;

    // (4) sub-delegation
    std::vector<int> room(n);
    for (DoId i = 0; i < n; ++i) room[i] = admission_limit(states_[i]) - auction.kappa[i];
    auto transfers = route_subdelegations(states_, dec, setup_.network, pending_, room,
                                          params_.max_delegation_depth, t);
    std::vector<int> sent(n, 0), received(n, 0);
    std::vector<double> paid(n, 0.0), income(n, 0.0);
    std::vector<std::vector<Task>> incoming(n);
    for (const auto& tr : transfers) {
      ++sent[tr.from];
      ++received[tr.to];
      paid[tr.from] += tr.price;
      income[tr.to] += tr.price;
      incoming[tr.to].push_back(tr.task);
    }
    double paid_total = 0.0, income_total = 0.0;
    for (DoId i = 0; i < n; ++i) {
      paid_total += paid[i];
      income_total += income[i];
    }
    ledger_.delegation_paid += paid_total;
    ledger_.delegation_received += income_total;
    res.transferred = sent;

    res.records.resize(n);
    res.bounds.resize(n);
    res.realized_drift.resize(n);
    for (DoId i = 0; i < n; ++i) {
      const auto& before = snap[i];
      auto& st = states_[i];
      auto& queue = pending_[i];

      // (5) work, oldest first
      const int worked = std::min<int>(dec[i].work, static_cast<int>(queue.size()));
      int on_time = 0;
      for (int w = 0; w < worked; ++w) {
        if (t - queue.front().arrival_step <= params_.deadline_steps) ++on_time;
        queue.pop_front();
      }
      ledger_.tasks_completed += worked;

      StepDecision effective = dec[i];
      effective.work = worked;
      effective.subdelegate = sent[i];

      // (6) queues
      const int admitted = auction.kappa[i];
      const int intake = admitted + received[i];
      st.pending = update_pending_queue(before.pending, worked, sent[i], dec[i].accept, admitted) + received[i];
      st.urgency = update_urgency_queue(before.urgency, worked, sent[i], before.avg_demand, before.pending > 0.0);
      kappa_mean_[i].add(intake);
      st.avg_demand = kappa_mean_[i].value();
      for (auto& task : auction.admitted[i]) queue.push_back(task);
      for (auto& task : incoming[i]) queue.push_back(task);
      ledger_.tasks_created += admitted;
      if (intake > admission_limit(before)) res.audit.admissions_within_cap = false;

      res.bounds[i] = drift_bound(before, effective, intake);
      res.realized_drift[i] = lyapunov_value(st.pending, st.urgency) - lyapunov_value(before.pending, before.urgency);
      const double excess = res.realized_drift[i] - res.bounds[i].bound;
      res.audit.max_drift_excess = std::max(res.audit.max_drift_excess, excess);
      if (excess > 1e-9) ++res.audit.drift_violations;

      // (7) reputation: due = on-time completions + tasks that just went overdue
      int overdue = 0;
      for (const auto& task : queue)
        if (t - task.arrival_step == params_.deadline_steps) ++overdue;
      auto& window = ratings_[i];
      window.push_back(on_time);
      int expired = 0;
      while (static_cast<int>(window.size()) > params_.reputation.on_time_window) {
        expired += window.front();
        window.pop_front();
      }
      const auto rep = update_reputation(before, on_time, on_time + overdue, params_.reputation, expired,
                                         params_.demand.reputation_floor);
      st.reputation = rep.reputation;
      st.positive_ratings = rep.positive_ratings;

      // (8) metrics
      const double avg_paid = sent[i] > 0 ? paid[i] / sent[i] : 0.0;
      auto& rec = res.records[i];
      rec.step = t;
      rec.do_id = i;
      rec.utility = utility(before, effective, admitted, avg_paid) + income[i];
      rec.pending = st.pending;
      rec.urgency = st.urgency;
      rec.accepted = admitted;
      rec.completed = worked;
      rec.subdelegated = sent[i];
      rec.price = dec[i].price;
      rec.reputation = st.reputation;

      if (st.pending != static_cast<double>(queue.size())) res.audit.queues_match_tasks = false;
    }

    // availability for the next step
    for (DoId i = 0; i < n; ++i) {
      const auto& prof = setup_.availability[i];
      auto rng = make_stream(seed_, StreamTag::Availability, i, static_cast<std::uint64_t>(t));
      const double u = uniform01(rng);
      busy_[i] = busy_[i] ? !(u < prof.p_leave_busy) : (u < prof.p_enter_busy);
      apply_availability(i);
      if (!validate_state(states_[i])) res.audit.states_valid = false;
    }

    std::int64_t held = 0;
    for (const auto& q : pending_) held += static_cast<std::int64_t>(q.size());
    res.audit.tasks_conserved = ledger_.tasks_created == held + ledger_.tasks_completed;
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); };
    res.audit.payments_conserved =
        close(mu_paid, do_paid) && close(paid_total, income_total) &&
        close(ledger_.mu_payments, ledger_.do_mu_revenue) && close(ledger_.delegation_paid, ledger_.delegation_received);

    ++step_;
    return res;
  }

 private:
  void apply_availability(DoId i) {
    const auto& prof = setup_.availability[i];
    const double level = busy_[i] ? prof.busy_level : 1.0;
    states_[i].availability = prof.rho_scale * level;
    states_[i].work_capacity = work_capacity_for(states_[i].theta_max, level);
  }

  WorldSetup setup_;
  MarketParams params_;
  std::uint64_t seed_;
  Step step_ = 0;
  TaskId next_task_id_ = 0;
  std::vector<DataOwnerState> states_;
  std::vector<std::deque<Task>> pending_;
  std::vector<RunningMean> kappa_mean_;
  std::vector<std::deque<int>> ratings_;
  std::vector<bool> busy_;
  LedgerTotals ledger_;
};

}  // namespace pasafl

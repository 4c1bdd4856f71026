#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "pasafl/core_types.hpp"

namespace pasafl {

// Pending-task queue: [q - theta - s]^+ + x * kappa.
inline double update_pending_queue(double q, int theta, int s, bool x, int kappa) {
  return std::max(q - theta - s, 0.0) + (x ? kappa : 0);
}

// Urgency queue: [Q - theta - s + kappa_bar * 1{q > 0}]^+.
inline double update_urgency_queue(double Q, int theta, int s, double kappa_bar, bool q_is_positive) {
  return std::max(Q - theta - s + (q_is_positive ? kappa_bar : 0.0), 0.0);
}

inline double average_demand(std::span<const int> kappa_history) {
  if (kappa_history.empty()) throw std::invalid_argument("average_demand: empty history");
  double sum = 0.0;
  for (int k : kappa_history) sum += k;
  return sum / static_cast<double>(kappa_history.size());
}

/// Causal version of the horizon average: mean of the admissions observed
/// so far, or `prior` before the first observation.
class RunningMean {
 public:
  explicit RunningMean(double prior = 1.0) : prior_(prior) {}

  void add(int kappa) {
    sum_ += kappa;
    ++count_;
  }

  double value() const { return count_ == 0 ? prior_ : sum_ / static_cast<double>(count_); }
  std::int64_t count() const { return count_; }

 private:
  double prior_;
  double sum_ = 0.0;
  std::int64_t count_ = 0;
};

inline double lyapunov_value(double q, double Q) { return 0.5 * (q * q + Q * Q); }

struct DriftBoundParts {
  double xi = 0.0;
  double q_term = 0.0;
  double Q_term = 0.0;
  double bound = 0.0;
};

inline double drift_constant(const DataOwnerState& s) {
  const double a = static_cast<double>(s.theta_max) + s.s_max;
  const double k = s.kappa_max;
  return a * a + k * k;
}

/// Upper bound on L(t+1) - L(t). `arrivals` is what actually enters the
/// pending queue this step (x * kappa plus any delegated-in tasks).
inline DriftBoundParts drift_bound(const DataOwnerState& s, const StepDecision& d, int arrivals) {
  DriftBoundParts parts;
  const double out = static_cast<double>(d.work) + d.subdelegate;
  parts.xi = drift_constant(s);
  parts.q_term = s.pending * (arrivals - out);
  parts.Q_term = s.urgency * (s.avg_demand - out);
  parts.bound = parts.xi + parts.q_term + parts.Q_term;
  return parts;
}

inline double subdelegation_cost(double avg_neighbor_price, int s) {
  // s == 0 with an infinite sentinel price must cost nothing, not NaN.
  if (s == 0) return 0.0;
  return avg_neighbor_price * s;
}

inline double training_cost(double unit_cost, int theta) { return unit_cost * theta; }

inline double revenue(const DataOwnerState& s, const StepDecision& d, double demand_f) {
  return d.accept ? d.price * s.reputation * demand_f : 0.0;
}

/// x * p * r * f - pbar * s - c * theta.
inline double utility(const DataOwnerState& s, const StepDecision& d, double demand_f,
                      double avg_neighbor_price) {
  return revenue(s, d, demand_f) - subdelegation_cost(avg_neighbor_price, d.subdelegate) -
         training_cost(s.unit_cost, d.work);
}

/// Drift-plus-penalty surrogate the closed-form rules maximise:
///   -s (rho pbar - q - Q) - xi - theta (rho c - q - Q) + x f (rho p r - q)
inline double objective_value(const DataOwnerState& s, const StepDecision& d, double demand_f,
                              double avg_neighbor_price) {
  const double rho = s.availability;
  const double backlog = s.pending + s.urgency;
  const double s_term =
      d.subdelegate == 0 ? 0.0 : -static_cast<double>(d.subdelegate) * (rho * avg_neighbor_price - backlog);
  const double theta_term = -static_cast<double>(d.work) * (rho * s.unit_cost - backlog);
  const double x = d.accept ? 1.0 : 0.0;
  const double x_term = rho * x * d.price * s.reputation * demand_f - s.pending * x * demand_f;
  return s_term - drift_constant(s) + theta_term + x_term;
}

}  // namespace pasafl

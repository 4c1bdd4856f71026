#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pasafl/policy_baselines.hpp"
#include "pasafl/policy_pas.hpp"

namespace pasafl {

enum class PricingRule { Pas, Rand, Ampp, Lin };
enum class DelegationRule { Pas, Rand, Greedy };
enum class AcceptanceRule { Pas, Always };

/// A decision policy is one rule per decision component. PAS-AFL uses the
/// closed-form rule everywhere; baselines and ablations swap components.
struct PolicySpec {
  std::string name;
  PricingRule pricing = PricingRule::Pas;
  DelegationRule delegation = DelegationRule::Pas;
  AcceptanceRule acceptance = AcceptanceRule::Pas;
};

inline const std::vector<PolicySpec>& policy_registry() {
  static const std::vector<PolicySpec> registry = {
      {"pas-afl", PricingRule::Pas, DelegationRule::Pas, AcceptanceRule::Pas},
      {"rand-rand", PricingRule::Rand, DelegationRule::Rand, AcceptanceRule::Always},
      {"rand-greedy", PricingRule::Rand, DelegationRule::Greedy, AcceptanceRule::Always},
      {"ampp-rand", PricingRule::Ampp, DelegationRule::Rand, AcceptanceRule::Always},
      {"ampp-greedy", PricingRule::Ampp, DelegationRule::Greedy, AcceptanceRule::Always},
      {"lin-rand", PricingRule::Lin, DelegationRule::Rand, AcceptanceRule::Always},
      {"lin-greedy", PricingRule::Lin, DelegationRule::Greedy, AcceptanceRule::Always},
      {"pas-wo-pricing-r", PricingRule::Rand, DelegationRule::Pas, AcceptanceRule::Pas},
      {"pas-wo-pricing-a", PricingRule::Ampp, DelegationRule::Pas, AcceptanceRule::Pas},
      {"pas-wo-pricing-l", PricingRule::Lin, DelegationRule::Pas, AcceptanceRule::Pas},
      {"pas-wo-subdel-r", PricingRule::Pas, DelegationRule::Rand, AcceptanceRule::Pas},
      {"pas-wo-subdel-g", PricingRule::Pas, DelegationRule::Greedy, AcceptanceRule::Pas},
  };
  return registry;
}

inline const std::array<std::string_view, 6> kBaselineNames = {"rand-rand", "rand-greedy", "ampp-rand",
                                                               "ampp-greedy", "lin-rand",  "lin-greedy"};
inline const std::array<std::string_view, 5> kAblationNames = {
    "pas-wo-pricing-r", "pas-wo-pricing-a", "pas-wo-pricing-l", "pas-wo-subdel-r", "pas-wo-subdel-g"};

inline bool is_known_policy(std::string_view name) {
  for (const auto& p : policy_registry())
    if (p.name == name) return true;
  return false;
}

inline const PolicySpec& find_policy(std::string_view name) {
  for (const auto& p : policy_registry())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown policy: " + std::string(name));
}

struct PolicyOptions {
  PasOptions pas;
  BaselineParams baseline;
};

/// Evaluates one policy for one owner. Component order is fixed for every
/// policy: work, sub-delegation, price, acceptance.
inline StepDecision decide(const PolicySpec& spec, const DataOwnerState& s, const DelegationContext& ctx,
                           const PolicyOptions& opt, Rng& rng) {
  StepDecision d;
  // Baselines have no work rule of their own and always work greedily.
  d.work = decide_work(s, spec.acceptance == AcceptanceRule::Pas ? opt.pas.work_mode : WorkMode::Greedy);

  switch (spec.delegation) {
    case DelegationRule::Pas: d.subdelegate = decide_subdelegation(s, ctx, d.work); break;
    case DelegationRule::Rand: d.subdelegate = subdel_rand(s, ctx, d.work, rng); break;
    case DelegationRule::Greedy: d.subdelegate = subdel_greedy(s, ctx, d.work); break;
  }

  switch (spec.pricing) {
    case PricingRule::Pas: {
      const auto priced = decide_price(s, opt.pas.reputation_floor);
      d.price = priced.price;
      d.price_degenerate = priced.degenerate;
      break;
    }
    case PricingRule::Rand: d.price = price_rand(s, opt.baseline, rng); break;
    case PricingRule::Ampp: d.price = price_ampp(s, opt.baseline, rng); break;
    case PricingRule::Lin: d.price = price_lin(s, opt.baseline); break;
  }

  d.accept = spec.acceptance == AcceptanceRule::Always ? admission_limit(s) > 0 : decide_acceptance(s, d.price);
  d.admission_cap = d.accept ? admission_limit(s) : 0;
  return d;
}

/// Named entry point for the six comparison strategies.
inline StepDecision baseline_joint(std::string_view policy_name, const DataOwnerState& s,
                                   const DelegationContext& ctx, const PolicyOptions& opt, Rng& rng) {
  for (auto name : kBaselineNames)
    if (name == policy_name) return decide(find_policy(policy_name), s, ctx, opt, rng);
  throw std::invalid_argument("unknown baseline policy: " + std::string(policy_name));
}

}  // namespace pasafl

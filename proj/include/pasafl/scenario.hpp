#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pasafl/market.hpp"

namespace pasafl {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for unreadable, malformed or invalid scenario files. `field`
/// names the offending key ("parse" for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct OwnerDistributions {
  Range unit_cost{0.3, 0.6};
  Range reserve_price{0.8, 1.2};
  Range rep_threshold{0.5, 0.7};
  IntRange theta_max{3, 6};
  IntRange s_max{1, 3};
  IntRange kappa_max{6, 10};
  Range alignment{0.0, 1.0};
  Range initial_reputation{0.8, 1.0};
  IntRange initial_positive_ratings{5, 20};
  Range rho_scale{2.0, 6.0};
  double busy_level = 0.4;
  double p_enter_busy = 0.1;
  double p_leave_busy = 0.2;
};

struct MuConfig {
  std::string strategy;
  double budget = 0.0;
  double bid_gain = 1.0;
  double valuation_markup = 1.0;
};

struct MarketSettings {
  int max_delegation_depth = 3;
  int deadline_steps = 5;
  double reputation_ema = 0.9;
  int rating_window = 10;
  double kappa_bar_prior = 1.0;
  double reputation_floor = kDefaultReputationFloor;
  ArrivalMode arrival_mode = ArrivalMode::Poisson;
};

struct ScenarioConfig {
  int n_dos = 100;
  int n_mus = 6;
  std::int64_t horizon_T = 500;
  double trust_edge_prob = 0.7;
  IntRange data_size_range{1000, 10000};
  MarketConstants constants{0.9, 0.5, 0.3, 0.2, 500};
  OwnerDistributions owners;
  std::vector<std::string> policy{"pas-afl"}; // one name, or one per owner
  std::vector<MuConfig> mus;
  MarketSettings market;
  BaselineParams baseline;
  WorkMode work_mode = WorkMode::Greedy;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
};

/// The six bidder stand-ins with their default parameters.
inline std::vector<MuConfig> default_mu_roster() {
  return {
      {"random", 120.0, 1.0, 2.0},
      {"greedy", 120.0, 1.0, 1.3},
      {"lin", 120.0, 1.15, 1.0},
      {"bmub", 120.0, 1.3, 1.0},
      {"fedbidder-simple", 120.0, 1.2, 1.0},
      {"fedbidder-complex", 120.0, 1.4, 1.0},
  };
}

// ---------------------------------------------------------------------------
// JSON <-> config
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline std::string arrival_name(ArrivalMode m) { return m == ArrivalMode::Poisson ? "poisson" : "deterministic"; }
inline std::string work_mode_name(WorkMode m) { return m == WorkMode::Greedy ? "greedy" : "threshold"; }

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "config" : path, "expected an object");
  std::set<std::string> known(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = path.empty() ? key : path + "." + key;
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("wrong type (") + e.what() + ")");
  }
}

inline void read_range(const json& obj, const char* key, const std::string& path, Range& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = path.empty() ? key : path + "." + key;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    throw ConfigError(field, "expected [lo, hi]");
  out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

inline void read_range(const json& obj, const char* key, const std::string& path, IntRange& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = path.empty() ? key : path + "." + key;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer())
    throw ConfigError(field, "expected [lo, hi] integers");
  out = {(*it)[0].get<std::int64_t>(), (*it)[1].get<std::int64_t>()};
}

inline json range_json(const Range& r) { return json::array({r.lo, r.hi}); }
inline json range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

}  // namespace detail

inline void validate_config(const ScenarioConfig& c) {
  auto check = [](bool ok, const char* field, const char* msg) {
    if (!ok) throw ConfigError(field, msg);
  };
  auto range_ok = [](const Range& r, double lo, double hi) {
    return std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi && r.lo >= lo && r.hi <= hi;
  };
  auto irange_ok = [](const IntRange& r, std::int64_t lo, std::int64_t hi) {
    return r.lo <= r.hi && r.lo >= lo && r.hi <= hi;
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::int64_t big = std::numeric_limits<int>::max();

  check(c.n_dos >= 1, "n_dos", "must be >= 1");
  check(c.horizon_T >= 1, "horizon_T", "must be >= 1");
  check(c.trust_edge_prob >= 0.0 && c.trust_edge_prob <= 1.0, "trust_edge_prob", "must lie in [0, 1]");
  check(irange_ok(c.data_size_range, 1000, 10000), "data_size_range", "must lie within [1000, 10000]");
  if (auto v = validate_constants(c.constants); !v) throw ConfigError("constants." + v.field, "invalid value");
  const auto& o = c.owners;
  check(range_ok(o.unit_cost, 0.0, inf), "owners.unit_cost", "need 0 <= lo <= hi");
  check(range_ok(o.reserve_price, 0.0, inf) && o.reserve_price.lo > 0.0, "owners.reserve_price", "need 0 < lo <= hi");
  check(range_ok(o.rep_threshold, 0.0, 1.0), "owners.rep_threshold", "need 0 <= lo <= hi <= 1");
  check(irange_ok(o.theta_max, 0, big), "owners.theta_max", "need 0 <= lo <= hi");
  check(irange_ok(o.s_max, 0, big), "owners.s_max", "need 0 <= lo <= hi");
  check(irange_ok(o.kappa_max, 1, big), "owners.kappa_max", "need 1 <= lo <= hi");
  check(range_ok(o.alignment, 0.0, inf), "owners.alignment", "need 0 <= lo <= hi");
  check(range_ok(o.initial_reputation, 0.0, 1.0), "owners.initial_reputation", "need 0 <= lo <= hi <= 1");
  check(irange_ok(o.initial_positive_ratings, 0, std::numeric_limits<std::int64_t>::max()),
        "owners.initial_positive_ratings", "need 0 <= lo <= hi");
  check(range_ok(o.rho_scale, 0.0, inf), "owners.rho_scale", "need 0 <= lo <= hi");
  check(o.busy_level >= 0.0 && o.busy_level <= 1.0, "owners.busy_level", "must lie in [0, 1]");
  check(o.p_enter_busy >= 0.0 && o.p_enter_busy <= 1.0, "owners.p_enter_busy", "must lie in [0, 1]");
  check(o.p_leave_busy >= 0.0 && o.p_leave_busy <= 1.0, "owners.p_leave_busy", "must lie in [0, 1]");

  check(static_cast<int>(c.mus.size()) == c.n_mus, "n_mus", "must equal the length of the mus roster");
  for (const auto& mu : c.mus) {
    try {
      parse_mu_strategy(mu.strategy);
    } catch (const std::invalid_argument&) {
      throw ConfigError("mus.strategy", "unknown strategy '" + mu.strategy + "'");
    }
    check(mu.budget >= 0.0, "mus.budget", "must be >= 0");
    check(mu.bid_gain >= 0.0, "mus.bid_gain", "must be >= 0");
    check(mu.valuation_markup >= 0.0, "mus.valuation_markup", "must be >= 0");
  }
  check(c.policy.size() == 1 || static_cast<int>(c.policy.size()) == c.n_dos, "policy",
        "give one policy name or one per owner");
  for (const auto& p : c.policy)
    if (!is_known_policy(p)) throw ConfigError("policy", "unknown policy '" + p + "'");

  const auto& m = c.market;
  check(m.max_delegation_depth >= 0, "market.max_delegation_depth", "must be >= 0");
  check(m.deadline_steps >= 1, "market.deadline_steps", "must be >= 1");
  check(m.reputation_ema >= 0.0 && m.reputation_ema < 1.0, "market.reputation_ema", "must lie in [0, 1)");
  check(m.rating_window >= 1, "market.rating_window", "must be >= 1");
  check(m.kappa_bar_prior >= 0.0, "market.kappa_bar_prior", "must be >= 0");
  check(m.reputation_floor > 0.0 && m.reputation_floor <= 1.0, "market.reputation_floor", "must lie in (0, 1]");
  check(c.baseline.markup_max > 0.0, "baseline.markup_max", "must be > 0");
  check(c.baseline.lin_gain > 0.0, "baseline.lin_gain", "must be > 0");
  check(!c.baseline.rand_cap_multiplier || *c.baseline.rand_cap_multiplier >= 1.0,
        "baseline.rand_cap_multiplier", "must be >= 1");
  check(!c.seeds.empty(), "seeds", "at least one seed is required");
}

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  using detail::read;
  using detail::read_range;
  ScenarioConfig c;
  detail::reject_unknown(j, "",
                         {"n_dos", "n_mus", "horizon_T", "trust_edge_prob", "data_size_range", "constants", "owners",
                          "policy", "mus", "market", "baseline", "pas", "seeds", "output_dir"});
  read(j, "n_dos", "", c.n_dos);
  read(j, "horizon_T", "", c.horizon_T);
  read(j, "trust_edge_prob", "", c.trust_edge_prob);
  read_range(j, "data_size_range", "", c.data_size_range);
  read(j, "output_dir", "", c.output_dir);

  if (auto it = j.find("constants"); it != j.end()) {
    detail::reject_unknown(*it, "constants", {"a0", "a1", "a2", "a3"});
    read(*it, "a0", "constants", c.constants.a0);
    read(*it, "a1", "constants", c.constants.a1);
    read(*it, "a2", "constants", c.constants.a2);
    read(*it, "a3", "constants", c.constants.a3);
  }
  c.constants.horizon_T = c.horizon_T;

  if (auto it = j.find("owners"); it != j.end()) {
    const auto& o = *it;
    const std::string p = "owners";
    detail::reject_unknown(o, p,
                           {"unit_cost", "reserve_price", "rep_threshold", "theta_max", "s_max", "kappa_max",
                            "alignment", "initial_reputation", "initial_positive_ratings", "rho_scale", "busy_level",
                            "p_enter_busy", "p_leave_busy"});
    auto& d = c.owners;
    read_range(o, "unit_cost", p, d.unit_cost);
    read_range(o, "reserve_price", p, d.reserve_price);
    read_range(o, "rep_threshold", p, d.rep_threshold);
    read_range(o, "theta_max", p, d.theta_max);
    read_range(o, "s_max", p, d.s_max);
    read_range(o, "kappa_max", p, d.kappa_max);
    read_range(o, "alignment", p, d.alignment);
    read_range(o, "initial_reputation", p, d.initial_reputation);
    read_range(o, "initial_positive_ratings", p, d.initial_positive_ratings);
    read_range(o, "rho_scale", p, d.rho_scale);
    read(o, "busy_level", p, d.busy_level);
    read(o, "p_enter_busy", p, d.p_enter_busy);
    read(o, "p_leave_busy", p, d.p_leave_busy);
  }

  if (auto it = j.find("policy"); it != j.end()) {
    if (it->is_string()) {
      c.policy = {it->get<std::string>()};
    } else if (it->is_array() && !it->empty() && std::all_of(it->begin(), it->end(), [](auto& v) { return v.is_string(); })) {
      c.policy = it->get<std::vector<std::string>>();
    } else {
      throw ConfigError("policy", "expected a policy name or a list of names");
    }
  }

  c.mus = default_mu_roster();
  if (auto it = j.find("mus"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("mus", "expected a list");
    c.mus.clear();
    for (const auto& m : *it) {
      detail::reject_unknown(m, "mus", {"strategy", "budget", "bid_gain", "valuation_markup"});
      MuConfig mu;
      read(m, "strategy", "mus", mu.strategy);
      if (mu.strategy.empty()) throw ConfigError("mus.strategy", "missing");
      // Unspecified knobs fall back to that strategy's roster defaults.
      for (const auto& def : default_mu_roster())
        if (def.strategy == mu.strategy) mu = def;
      read(m, "budget", "mus", mu.budget);
      read(m, "bid_gain", "mus", mu.bid_gain);
      read(m, "valuation_markup", "mus", mu.valuation_markup);
      c.mus.push_back(mu);
    }
  }
  c.n_mus = static_cast<int>(c.mus.size());
  read(j, "n_mus", "", c.n_mus);

  if (auto it = j.find("market"); it != j.end()) {
    const std::string p = "market";
    detail::reject_unknown(*it, p,
                           {"max_delegation_depth", "deadline_steps", "reputation_ema", "rating_window",
                            "kappa_bar_prior", "reputation_floor", "arrival_mode"});
    auto& m = c.market;
    read(*it, "max_delegation_depth", p, m.max_delegation_depth);
    read(*it, "deadline_steps", p, m.deadline_steps);
    read(*it, "reputation_ema", p, m.reputation_ema);
    read(*it, "rating_window", p, m.rating_window);
    read(*it, "kappa_bar_prior", p, m.kappa_bar_prior);
    read(*it, "reputation_floor", p, m.reputation_floor);
    std::string mode = detail::arrival_name(m.arrival_mode);
    read(*it, "arrival_mode", p, mode);
    if (mode == "poisson") m.arrival_mode = ArrivalMode::Poisson;
    else if (mode == "deterministic") m.arrival_mode = ArrivalMode::Deterministic;
    else throw ConfigError("market.arrival_mode", "expected 'poisson' or 'deterministic'");
  }

  if (auto it = j.find("baseline"); it != j.end()) {
    detail::reject_unknown(*it, "baseline", {"markup_max", "lin_gain", "rand_cap_multiplier"});
    read(*it, "markup_max", "baseline", c.baseline.markup_max);
    read(*it, "lin_gain", "baseline", c.baseline.lin_gain);
    if (auto r = it->find("rand_cap_multiplier"); r != it->end() && !r->is_null()) {
      if (!r->is_number()) throw ConfigError("baseline.rand_cap_multiplier", "expected a number");
      c.baseline.rand_cap_multiplier = r->get<double>();
    }
  }

  if (auto it = j.find("pas"); it != j.end()) {
    detail::reject_unknown(*it, "pas", {"work_mode"});
    std::string mode = detail::work_mode_name(c.work_mode);
    read(*it, "work_mode", "pas", mode);
    if (mode == "greedy") c.work_mode = WorkMode::Greedy;
    else if (mode == "threshold") c.work_mode = WorkMode::Threshold;
    else throw ConfigError("pas.work_mode", "expected 'greedy' or 'threshold'");
  }

  if (auto it = j.find("seeds"); it != j.end()) {
    if (!it->is_array() || !std::all_of(it->begin(), it->end(), [](auto& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.template get<std::int64_t>() >= 0); }))
      throw ConfigError("seeds", "expected a list of non-negative integers");
    c.seeds = it->get<std::vector<std::uint64_t>>();
  }

  validate_config(c);
  return c;
}

/// Fully resolved config, every default filled in.
inline nlohmann::json config_to_json(const ScenarioConfig& c) {
  using detail::range_json;
  using nlohmann::json;
  json j;
  j["n_dos"] = c.n_dos;
  j["n_mus"] = c.n_mus;
  j["horizon_T"] = c.horizon_T;
  j["trust_edge_prob"] = c.trust_edge_prob;
  j["data_size_range"] = range_json(c.data_size_range);
  j["constants"] = {{"a0", c.constants.a0}, {"a1", c.constants.a1}, {"a2", c.constants.a2}, {"a3", c.constants.a3}};
  const auto& o = c.owners;
  j["owners"] = {{"unit_cost", range_json(o.unit_cost)},
                 {"reserve_price", range_json(o.reserve_price)},
                 {"rep_threshold", range_json(o.rep_threshold)},
                 {"theta_max", range_json(o.theta_max)},
                 {"s_max", range_json(o.s_max)},
                 {"kappa_max", range_json(o.kappa_max)},
                 {"alignment", range_json(o.alignment)},
                 {"initial_reputation", range_json(o.initial_reputation)},
                 {"initial_positive_ratings", range_json(o.initial_positive_ratings)},
                 {"rho_scale", range_json(o.rho_scale)},
                 {"busy_level", o.busy_level},
                 {"p_enter_busy", o.p_enter_busy},
                 {"p_leave_busy", o.p_leave_busy}};
  j["policy"] = c.policy.size() == 1 ? json(c.policy.front()) : json(c.policy);
  j["mus"] = json::array();
  for (const auto& mu : c.mus)
    j["mus"].push_back({{"strategy", mu.strategy},
                        {"budget", mu.budget},
                        {"bid_gain", mu.bid_gain},
                        {"valuation_markup", mu.valuation_markup}});
  const auto& m = c.market;
  j["market"] = {{"max_delegation_depth", m.max_delegation_depth}, {"deadline_steps", m.deadline_steps},
                 {"reputation_ema", m.reputation_ema},             {"rating_window", m.rating_window},
                 {"kappa_bar_prior", m.kappa_bar_prior},           {"reputation_floor", m.reputation_floor},
                 {"arrival_mode", detail::arrival_name(m.arrival_mode)}};
  j["baseline"] = {{"markup_max", c.baseline.markup_max},
                   {"lin_gain", c.baseline.lin_gain},
                   {"rand_cap_multiplier", c.baseline.rand_cap_multiplier ? json(*c.baseline.rand_cap_multiplier)
                                                                          : json(nullptr)}};
  j["pas"] = {{"work_mode", detail::work_mode_name(c.work_mode)}};
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  return j;
}

inline ScenarioConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("parse", e.what());
  }
  return config_from_json(j);
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ---------------------------------------------------------------------------
// World construction
// ---------------------------------------------------------------------------

inline MarketParams market_params(const ScenarioConfig& c) {
  MarketParams p;
  p.constants = c.constants;
  p.demand.reputation_floor = c.market.reputation_floor;
  p.demand.arrivals = c.market.arrival_mode;
  p.reputation.ema_beta = c.market.reputation_ema;
  p.reputation.on_time_window = c.market.rating_window;
  p.policy.pas.work_mode = c.work_mode;
  p.policy.pas.reputation_floor = c.market.reputation_floor;
  p.policy.baseline = c.baseline;
  p.max_delegation_depth = c.market.max_delegation_depth;
  p.deadline_steps = c.market.deadline_steps;
  p.kappa_bar_prior = c.market.kappa_bar_prior;
  return p;
}

/// Builds the seeded world. Owners, MUs and the trust graph depend only on
/// (config, seed), so every policy evaluated on a seed faces the same market.
inline World build_world(const ScenarioConfig& c, std::uint64_t seed,
                         const std::vector<std::string>& policy_assignment) {
  const auto n = static_cast<std::size_t>(c.n_dos);
  WorldSetup setup;

  auto grng = make_stream(seed, StreamTag::TrustGraph);
  setup.network = generate_trust_network(n, c.trust_edge_prob, grng);

  auto prng = make_stream(seed, StreamTag::Profiles);
  auto draw = [&](const Range& r) { return uniform(prng, r.lo, r.hi); };
  auto draw_int = [&](const IntRange& r) {
    return std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(prng);
  };
  const auto& d = c.owners;
  const double stationary_busy =
      d.p_enter_busy + d.p_leave_busy > 0.0 ? d.p_enter_busy / (d.p_enter_busy + d.p_leave_busy) : 0.0;
  for (DoId i = 0; i < n; ++i) {
    DataOwnerState s;
    s.id = i;
    s.unit_cost = draw(d.unit_cost);
    s.reserve_price = draw(d.reserve_price);
    s.rep_threshold = draw(d.rep_threshold);
    s.theta_max = static_cast<int>(draw_int(d.theta_max));
    s.s_max = static_cast<int>(draw_int(d.s_max));
    s.kappa_max = static_cast<int>(draw_int(d.kappa_max));
    s.alignment = draw(d.alignment);
    s.reputation = std::max(draw(d.initial_reputation), c.market.reputation_floor);
    s.positive_ratings = draw_int(d.initial_positive_ratings);
    s.data_size = draw_int(c.data_size_range);
    s.price = s.reserve_price;
    s.avg_demand = c.market.kappa_bar_prior;
    setup.owners.push_back(s);

    AvailabilityProfile a;
    a.rho_scale = draw(d.rho_scale);
    a.busy_level = d.busy_level;
    a.p_enter_busy = d.p_enter_busy;
    a.p_leave_busy = d.p_leave_busy;
    setup.availability.push_back(a);
    setup.initially_busy.push_back(uniform01(prng) < stationary_busy);
  }

  auto mrng = make_stream(seed, StreamTag::ModelUsers);
  for (std::size_t m = 0; m < c.mus.size(); ++m) {
    const auto& mc = c.mus[m];
    ModelUser mu;
    mu.id = static_cast<MuId>(m);
    mu.strategy = parse_mu_strategy(mc.strategy);
    mu.budget_per_step = mc.budget;
    mu.bid_gain = mc.bid_gain;
    mu.valuation.resize(n);
    for (DoId i = 0; i < n; ++i) {
      const auto& o = setup.owners[i];
      mu.valuation[i] =
          mc.valuation_markup * o.reserve_price * (0.8 + 0.4 * normalized_data_size(o)) * uniform(mrng, 0.9, 1.1);
    }
    setup.mus.push_back(std::move(mu));
  }

  for (DoId i = 0; i < n; ++i) {
    const auto& name = policy_assignment.size() == 1 ? policy_assignment.front() : policy_assignment.at(i);
    setup.policies.push_back(find_policy(name));
  }

  return World(std::move(setup), market_params(c), seed);
}

}  // namespace pasafl

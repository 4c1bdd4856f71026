#include <gtest/gtest.h>

#include <random>

#include "pasafl/core_types.hpp"
#include "pasafl/persist.hpp"

using namespace pasafl;

namespace {

DataOwnerState midpoint_state() {
  DataOwnerState s;
  s.reputation = 0.5;
  s.reserve_price = 1.0;
  return s;
}

DataOwnerState random_valid_state(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DataOwnerState s;
  s.id = static_cast<DoId>(g() % 100);
  s.reputation = u(g);
  s.rep_threshold = u(g);
  s.pending = 20.0 * u(g);
  s.urgency = 50.0 * u(g);
  s.avg_demand = 5.0 * u(g);
  s.availability = 6.0 * u(g);
  s.unit_cost = u(g);
  s.reserve_price = 0.1 + 2.0 * u(g);
  s.theta_max = static_cast<int>(g() % 8);
  s.s_max = static_cast<int>(g() % 4);
  s.kappa_max = 1 + static_cast<int>(g() % 10);
  s.work_capacity = s.theta_max == 0 ? 0 : static_cast<int>(g() % (s.theta_max + 1));
  s.alignment = u(g);
  s.positive_ratings = static_cast<std::int64_t>(g() % 1000);
  s.price = s.reserve_price * (1.0 + u(g));
  s.data_size = 1000 + static_cast<std::int64_t>(g() % 9001);
  return s;
}

}  // namespace

TEST(ValidateState, MidpointStateIsValid) { EXPECT_TRUE(validate_state(midpoint_state()).ok); }

TEST(ValidateState, ReputationAboveOne) {
  auto s = midpoint_state();
  s.reputation = 1.2;
  const auto v = validate_state(s);
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.field, "reputation_r");
}

TEST(ValidateState, NegativePendingQueue) {
  auto s = midpoint_state();
  s.pending = -1.0;
  EXPECT_EQ(validate_state(s).field, "pending_q");
}

TEST(ValidateState, ReportsFirstViolationOnly) {
  auto s = midpoint_state();
  s.urgency = -2.0;
  s.kappa_max = 0;
  EXPECT_EQ(validate_state(s).field, "urgency_Q");
}

TEST(ValidateState, EachInvariantHasItsOwnName) {
  struct Case {
    void (*mutate)(DataOwnerState&);
    const char* field;
  };
  const Case cases[] = {
      {[](DataOwnerState& s) { s.rep_threshold = -0.1; }, "rep_threshold_r_min"},
      {[](DataOwnerState& s) { s.urgency = std::nan(""); }, "urgency_Q"},
      {[](DataOwnerState& s) { s.avg_demand = -1.0; }, "avg_demand_kappa_bar"},
      {[](DataOwnerState& s) { s.availability = -0.5; }, "availability_rho"},
      {[](DataOwnerState& s) { s.unit_cost = -1.0; }, "unit_cost_c"},
      {[](DataOwnerState& s) { s.reserve_price = 0.0; }, "reserve_price_p_min"},
      {[](DataOwnerState& s) { s.theta_max = -1; }, "theta_max"},
      {[](DataOwnerState& s) { s.s_max = -1; }, "s_max"},
      {[](DataOwnerState& s) { s.kappa_max = 0; }, "kappa_max"},
      {[](DataOwnerState& s) { s.work_capacity = 1; }, "work_capacity"},
      {[](DataOwnerState& s) { s.alignment = -1.0; }, "alignment_epsilon"},
      {[](DataOwnerState& s) { s.positive_ratings = -3; }, "positive_ratings_Mp"},
      {[](DataOwnerState& s) { s.price = 0.5; }, "current_price_p"},
      {[](DataOwnerState& s) { s.data_size = 999; }, "data_size"},
  };
  for (const auto& c : cases) {
    auto s = midpoint_state();
    c.mutate(s);
    EXPECT_EQ(validate_state(s).field, c.field);
  }
}

TEST(ValidateState, UnsetPriceIsAllowed) {
  auto s = midpoint_state();
  s.price = 0.0;
  EXPECT_TRUE(validate_state(s).ok);
  s.price = s.reserve_price;
  EXPECT_TRUE(validate_state(s).ok);
}

TEST(ValidateConstants, A1MustBePositive) {
  MarketConstants c;
  EXPECT_TRUE(validate_constants(c).ok);
  c.a1 = 0.0;
  EXPECT_EQ(validate_constants(c).field, "a1");
  c.a1 = 1.0;
  c.horizon_T = 0;
  EXPECT_EQ(validate_constants(c).field, "horizon_T");
}

TEST(ValidateDecision, Bounds) {
  auto s = midpoint_state();
  s.theta_max = 2;
  s.s_max = 3;
  s.pending = 2.7;
  StepDecision d{true, 1.0, 2, 2, 1, false};
  EXPECT_TRUE(validate_decision(s, d).ok);
  d.work = 3;
  EXPECT_EQ(validate_decision(s, d).field, "work_theta");
  d.work = 2;
  d.subdelegate = 3; // floor(q) = 2
  EXPECT_EQ(validate_decision(s, d).field, "subdelegate_s");
  d.subdelegate = 0;
  d.price = 0.99;
  EXPECT_EQ(validate_decision(s, d).field, "price_p");
}

TEST(TrustNetwork, SymmetricAndIrreflexive) {
  TrustNetwork net(4);
  net.add_edge(2, 0);
  net.add_edge(0, 3);
  net.add_edge(0, 2); // duplicate
  EXPECT_EQ(net.edge_count(), 2u);
  EXPECT_TRUE(net.connected(0, 2));
  EXPECT_TRUE(net.connected(2, 0));
  EXPECT_FALSE(net.connected(1, 0));
  EXPECT_EQ(net.neighbors(0), (std::vector<DoId>{2, 3}));
  EXPECT_TRUE(net.neighbors(1).empty());
  EXPECT_THROW(net.add_edge(1, 1), std::invalid_argument);
  EXPECT_THROW(net.add_edge(1, 9), std::out_of_range);
}

TEST(Persistence, StateRoundTripIsFieldwiseIdentical) {
  std::mt19937_64 g(17);
  for (int i = 0; i < 500; ++i) {
    const auto s = random_valid_state(g);
    ASSERT_TRUE(validate_state(s).ok) << validate_state(s).field;
    const nlohmann::json j = s;
    const auto back = nlohmann::json::parse(j.dump()).get<DataOwnerState>();
    EXPECT_EQ(back, s);
  }
}

TEST(Persistence, MetricsRecordRoundTrip) {
  const MetricsRecord r{12, 4, -0.125, 3.0, 7.5, 2, 1, 1, 1.0625, 0.875};
  const nlohmann::json j = r;
  EXPECT_EQ(nlohmann::json::parse(j.dump()).get<MetricsRecord>(), r);
}

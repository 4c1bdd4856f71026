#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "pasafl/pasafl.hpp"

using namespace pasafl;

namespace {

DataOwnerState reserve(double p_min) {
  DataOwnerState s;
  s.reserve_price = p_min;
  s.reputation = 1.0;
  s.availability = 1.0;
  return s;
}

DataOwnerState six_pending() {
  auto s = reserve(1.0);
  s.pending = 6;
  s.theta_max = 2;
  s.work_capacity = 1;
  s.s_max = 3;
  s.kappa_max = 5;
  return s;
}

DelegationContext someone_eligible() {
  DelegationContext c;
  c.avg_neighbor_price = 1.0;
  c.eligible.push_back({1, 1.0, 1.0});
  c.cheapest_eligible_price = 1.0;
  return c;
}

}  // namespace

TEST(PriceRand, DegenerateInterval) {
  BaselineParams bp;
  bp.rand_cap_multiplier = 1.0;
  Rng rng(1);
  EXPECT_EQ(price_rand(reserve(1.0), bp, rng), 1.0);
}

TEST(PriceRand, UniformMeanAndSupport) {
  BaselineParams bp;
  bp.rand_cap_multiplier = 3.0;
  Rng rng(2);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double p = price_rand(reserve(1.0), bp, rng);
    ASSERT_GE(p, 1.0);
    ASSERT_LE(p, 3.0);
    sum += p;
  }
  EXPECT_NEAR(sum / 100000, 2.0, 0.01);
}

TEST(PriceRand, DefaultCapMatchesAmppAndLinSupports) {
  EXPECT_DOUBLE_EQ(BaselineParams{}.rand_cap(1.0), 4.0);
  BaselineParams wide;
  wide.markup_max = 2.0;
  EXPECT_DOUBLE_EQ(wide.rand_cap(0.5), 3.0);
}

TEST(PriceAmpp, MonteCarloMean) {
  BaselineParams bp; // markup_max = 1
  Rng rng(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double p = price_ampp(reserve(2.0), bp, rng);
    ASSERT_GE(p, 2.0);
    sum += p;
  }
  EXPECT_NEAR(sum / 100000, 3.0, 0.02);
}

TEST(PriceLin, Examples) {
  BaselineParams bp;
  bp.lin_gain = 1.0;
  EXPECT_EQ(price_lin(reserve(1.7), bp), 1.7);
  bp.lin_gain = 1.5;
  EXPECT_EQ(price_lin(reserve(2.0), bp), 3.0);
  bp.lin_gain = 2.0;
  EXPECT_EQ(price_lin(reserve(0.5), bp), 1.0);
}

TEST(SubdelRand, Examples) {
  Rng rng(4);
  EXPECT_EQ(subdel_rand(reserve(1.0), someone_eligible(), 0, rng), 0);
  EXPECT_EQ(subdel_rand(six_pending(), DelegationContext{}, 1, rng), 0);
}

TEST(SubdelRand, SupportIsFullClampRange) {
  Rng rng(5);
  std::set<int> seen;
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) {
    const int s = subdel_rand(six_pending(), someone_eligible(), 1, rng);
    seen.insert(s);
    zeros += s == 0;
  }
  EXPECT_EQ(seen, (std::set<int>{0, 1, 2, 3}));
  // P(0) = 1/2 + 1/2 * 1/4
  EXPECT_NEAR(zeros / 100000.0, 0.625, 0.01);
}

TEST(SubdelGreedy, Examples) {
  EXPECT_EQ(subdel_greedy(six_pending(), someone_eligible(), 1), 3);
  auto one = six_pending();
  one.pending = 1;
  EXPECT_EQ(subdel_greedy(one, someone_eligible(), 1), 0);
  EXPECT_EQ(subdel_greedy(six_pending(), DelegationContext{}, 1), 0);
}

TEST(BaselineJoint, LinGreedyComposition) {
  PolicyOptions opt;
  Rng rng(6);
  const auto s = six_pending();
  const auto d = baseline_joint("lin-greedy", s, someone_eligible(), opt, rng);
  EXPECT_TRUE(d.accept);
  EXPECT_EQ(d.price, opt.baseline.lin_gain * s.reserve_price);
  EXPECT_EQ(d.subdelegate, 3);
  EXPECT_EQ(d.work, std::min(6, s.work_capacity));
}

TEST(BaselineJoint, ZeroState) {
  PolicyOptions opt;
  DataOwnerState s = reserve(1.0);
  s.theta_max = 2;
  s.kappa_max = 4;
  for (auto name : kBaselineNames) {
    Rng rng(7);
    const auto d = baseline_joint(name, s, someone_eligible(), opt, rng);
    EXPECT_TRUE(d.accept) << name;
    EXPECT_EQ(d.subdelegate, 0) << name;
    EXPECT_EQ(d.work, 0) << name;
    EXPECT_GE(d.price, s.reserve_price) << name;
  }
}

TEST(BaselineJoint, ReproducibleWithSameStream) {
  PolicyOptions opt;
  const auto s = six_pending();
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i)
    EXPECT_EQ(baseline_joint("rand-rand", s, someone_eligible(), opt, a),
              baseline_joint("rand-rand", s, someone_eligible(), opt, b));
}

TEST(BaselineJoint, UnknownName) {
  PolicyOptions opt;
  Rng rng(1);
  EXPECT_THROW(baseline_joint("pas-afl", six_pending(), someone_eligible(), opt, rng), std::invalid_argument);
  EXPECT_THROW(baseline_joint("nope", six_pending(), someone_eligible(), opt, rng), std::invalid_argument);
}

TEST(BaselineJoint, AlwaysValid) {
  PolicyOptions opt;
  std::mt19937_64 g(8);
  for (int i = 0; i < 10000; ++i) {
    const auto c = fixtures::random_policy_case(g);
    for (auto name : kBaselineNames) {
      Rng rng(g());
      const auto d = baseline_joint(name, c.state, c.ctx, opt, rng);
      const auto v = validate_decision(c.state, d);
      ASSERT_TRUE(v.ok) << name << " " << v.field;
    }
  }
}

TEST(Ablations, DifferFromPasInExactlyOneComponent) {
  const auto& pas = find_policy("pas-afl");
  for (auto name : kAblationNames) {
    const auto& a = find_policy(name);
    const int diffs = (a.pricing != pas.pricing) + (a.delegation != pas.delegation) + (a.acceptance != pas.acceptance);
    EXPECT_EQ(diffs, 1) << name;
  }
}

TEST(Ablations, DecisionTraceDiffTouchesOneField) {
  // Same snapshots fed to pas-afl and to each ablation: only the ablated
  // component's field (and whatever reads it downstream) may change.
  ScenarioConfig cfg = parse_config(R"({"n_dos": 30, "horizon_T": 60, "seeds": [3]})");
  World world = build_world(cfg, 3, {"pas-afl"});
  const auto params = market_params(cfg);
  for (int t = 0; t < 60; ++t) {
    const auto out = world.step();
    const auto refpay = world.reference_payments();
    for (auto name : kAblationNames) {
      const auto& spec = find_policy(name);
      for (DoId i = 0; i < out.snapshot.size(); ++i) {
        const auto ctx = make_delegation_context(world.network(), i, out.snapshot, refpay[i]);
        Rng r1(static_cast<std::uint64_t>(t) * 1000 + i), r2(static_cast<std::uint64_t>(t) * 1000 + i);
        const auto base = decide(find_policy("pas-afl"), out.snapshot[i], ctx, params.policy, r1);
        const auto abl = decide(spec, out.snapshot[i], ctx, params.policy, r2);
        EXPECT_EQ(abl.work, base.work);
        if (spec.delegation == DelegationRule::Pas) {
          EXPECT_EQ(abl.subdelegate, base.subdelegate) << name;
        } else {
          EXPECT_EQ(abl.price, base.price) << name;
          EXPECT_EQ(abl.accept, base.accept) << name;
        }
      }
    }
  }
}

#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "rapa/instance_io.hpp"
#include "rapa/model.hpp"

using namespace rapa;

TEST_CASE("damage on each segment") {
  const NodeParams node{1.0, 2.0, 10.0};
  CHECK(damage(node, 6.0, 1) == 0.5);
  CHECK(damage(node, 12.0, 1) == 0.0);
  CHECK(damage(node, 1.0, 0) == 0.0);
  CHECK(damage(node, 2.0, 1) == 1.0);
  CHECK(damage(node, 1.0, 1) == 1.0);
  CHECK(damage(node, 10.0, 1) == 0.0);
}

TEST_CASE("expected damage") {
  const NodeParams node{1.0, 2.0, 10.0};
  CHECK(expected_damage(node, 2.0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(expected_damage(node, 11.0, 0.9) == 0.0);
  // Zero r_min is outside NodeParams' invariant but the formula is total.
  const NodeParams wide{1.0, 0.0, 4.0};
  CHECK(expected_damage(wide, 1.0, 0.5) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("slot damage is the weighted sum") {
  const std::vector<NodeParams> nodes{{1.0, 0.0, 4.0}, {2.0, 0.0, 4.0}};
  // Contributions 0.5 and 0.25 before weighting.
  const std::vector<double> r{2.0, 3.0};
  const std::vector<std::uint8_t> y{1, 1};
  CHECK(slot_damage(r, y, nodes) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<std::uint8_t> none{0, 0};
  CHECK(slot_damage(r, none, nodes) == 0.0);
  const std::vector<double> full{4.0, 4.0};
  CHECK(slot_damage(full, y, nodes) == 0.0);
}

TEST_CASE("plan cost") {
  CostMatrix c(3);
  c(0, 1) = 1.5;
  c(1, 2) = 0.5;
  CHECK(plan_cost({}, c) == 0.0);
  TransferPlan one{{{0, 1, 2.0}}, 0.0};
  CHECK(plan_cost(one, c) == 3.0);
  TransferPlan two{{{0, 1, 2.0}, {1, 2, 4.0}}, 0.0};
  CHECK(plan_cost(two, c) == 5.0);
}

TEST_CASE("risk parameter") {
  CHECK(RiskParams(0.5).kappa() == 1.0);
  CHECK(RiskParams(0.2).kappa() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(RiskParams(0.0), ValidationError);
  CHECK_THROWS_AS(RiskParams(1.0), ValidationError);
  double prev = RiskParams(0.001).kappa();
  for (double a = 0.01; a < 1.0; a += 0.01) {
    const double k = RiskParams(a).kappa();
    CHECK(k < prev);
    prev = k;
  }
}

TEST_CASE("damage properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto nodes = testutil::random_nodes(rng, 1);
    const auto& nd = nodes[0];
    double prev = 2.0;
    for (double r = 0.0; r <= nd.r_max + 1.0; r += 0.05) {
      const double d = damage(nd, r, 1);
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
      CHECK(d <= prev);
      CHECK(damage(nd, r, 0) == 0.0);
      const double p = u(rng);
      CHECK(expected_damage(nd, r, p) == p * d);
      CHECK(expected_damage(nd, r, p) <= expected_damage(nd, r, std::min(1.0, p + 0.1)));
      prev = d;
    }
  }
}

TEST_CASE("slot damage is linear in the weights") {
  std::mt19937_64 rng(12);
  auto nodes = testutil::random_nodes(rng, 6);
  std::vector<double> r;
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    r.push_back(0.5 * (nodes[i].r_min + nodes[i].r_max));
    y.push_back(static_cast<std::uint8_t>(i % 2));
  }
  const double base = slot_damage(r, y, nodes);
  for (auto& nd : nodes) nd.weight *= 3.0;
  CHECK(slot_damage(r, y, nodes) == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("instance validation") {
  std::mt19937_64 rng(3);
  Instance inst = testutil::random_instance(rng, 4, 5);
  CHECK_NOTHROW(inst.validate());

  SUBCASE("budget below sum of minimums") {
    inst.budget = inst.sum_r_min() - 0.1;
    CHECK_THROWS_AS(inst.validate(), InfeasibleError);
  }
  SUBCASE("negative cost") {
    inst.costs(0, 1) = -1.0;
    CHECK_THROWS_AS(inst.validate(), ValidationError);
  }
  SUBCASE("nonzero diagonal") {
    inst.costs(2, 2) = 0.5;
    CHECK_THROWS_AS(inst.validate(), ValidationError);
  }
  SUBCASE("r_max not above r_min") {
    inst.nodes[1].r_max = inst.nodes[1].r_min;
    CHECK_THROWS_AS(inst.validate(), ValidationError);
  }
  SUBCASE("probability out of range") {
    inst.attack_probs[0] = 1.5;
    CHECK_THROWS_AS(inst.validate(), ValidationError);
  }
  SUBCASE("negative weight") {
    inst.nodes[0].weight = -1.0;
    CHECK_THROWS_AS(inst.validate(), ValidationError);
  }
}

TEST_CASE("attack trace rejects non-binary entries") {
  AttackTrace tr(2, 3);
  CHECK_NOTHROW(tr.set(1, 2, 1));
  CHECK(tr.at(1, 2) == 1);
  CHECK_THROWS_AS(tr.set(0, 0, 2), ValidationError);
  CHECK_THROWS_AS(tr.set(0, 0, -1), ValidationError);
}

TEST_CASE("initial allocation follows the weights") {
  Instance inst;
  inst.n = 3;
  inst.horizon = 1;
  inst.nodes = {{1.0, 1.0, 10.0}, {1.0, 2.0, 10.0}, {2.0, 1.0, 10.0}};
  inst.costs = CostMatrix(3);
  inst.attack_probs = {0.1, 0.1, 0.1};
  inst.budget = 8.0;  // slack 4 split 1:1:2
  const auto r = initial_allocation(inst);
  CHECK(r[0] == doctest::Approx(2.0));
  CHECK(r[1] == doctest::Approx(3.0));
  CHECK(r[2] == doctest::Approx(3.0));

  SUBCASE("equal weights split the slack equally") {
    for (auto& nd : inst.nodes) nd.weight = 1.5;
    const auto eq = initial_allocation(inst);
    CHECK(eq[0] - 1.0 == doctest::Approx(4.0 / 3.0));
    CHECK(eq[1] - 2.0 == doctest::Approx(4.0 / 3.0));
  }
}

TEST_CASE("proportional allocation caps and redistributes") {
  const std::vector<NodeParams> nodes{{1.0, 1.0, 2.0}, {1.0, 1.0, 10.0}, {1.0, 1.0, 10.0}};
  const std::vector<double> scores{10.0, 1.0, 1.0};
  const auto r = proportional_allocation(nodes, scores, 9.0);
  CHECK(r[0] == 2.0);
  CHECK(r[1] == doctest::Approx(3.5));
  CHECK(r[2] == doctest::Approx(3.5));

  SUBCASE("zero scores fall back to an equal split") {
    const std::vector<double> zero{0.0, 0.0, 0.0};
    const auto e = proportional_allocation(nodes, zero, 6.0);
    CHECK(e[0] == doctest::Approx(2.0));
    CHECK(e[1] == doctest::Approx(2.0));
  }
}

TEST_CASE("proportional allocation is feasible and spends the budget") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto nodes = testutil::random_nodes(rng, n);
    double lo = 0.0, hi = 0.0;
    for (const auto& nd : nodes) {
      lo += nd.r_min;
      hi += nd.r_max;
    }
    const double budget = lo + u(rng) * (hi - lo) * 1.2;
    std::vector<double> scores(n);
    for (auto& s : scores) s = u(rng) < 0.2 ? 0.0 : u(rng);
    const auto r = proportional_allocation(nodes, scores, budget);
    CHECK(is_feasible(r, nodes, budget));
    CHECK(testutil::sum(r) == doctest::Approx(std::min(budget, hi)).epsilon(1e-12));
  }
}

TEST_CASE("budget at the range endpoints") {
  const std::vector<NodeParams> nodes{{1.0, 0.1, 0.3}, {1.0, 0.2, 0.7}, {1.0, 0.3, 1.1}};
  const double lo = 0.1 + 0.2 + 0.3;
  CHECK(budget_slack(nodes, lo) >= 0.0);
  CHECK_THROWS_AS((void)budget_slack(nodes, lo - 1e-6), InfeasibleError);
  const double hi = 0.3 + 0.7 + 1.1;
  const std::vector<double> scores{1.0, 2.0, 3.0};
  const auto r = proportional_allocation(nodes, scores, hi);
  for (std::size_t i = 0; i < nodes.size(); ++i) CHECK(r[i] == nodes[i].r_max);
}

TEST_CASE("instance JSON round trip") {
  std::mt19937_64 rng(9);
  const Instance inst = testutil::random_instance(rng, 5, 7);
  const auto j = instance_to_json(inst);
  CHECK(j.at("T") == 7);
  CHECK(j.at("nodes").size() == 5);
  CHECK(j.at("nodes")[0].contains("w"));
  CHECK(instance_from_json(j) == inst);

  SUBCASE("malformed input is a validation error") {
    auto bad = j;
    bad.erase("costs");
    CHECK_THROWS_AS((void)instance_from_json(bad), ValidationError);
    auto neg = j;
    neg["costs"][0][1] = -2.0;
    CHECK_THROWS_AS((void)instance_from_json(neg), ValidationError);
  }
}

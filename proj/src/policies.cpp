#include "rapa/policies.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

namespace rapa {

PolicyId parse_policy(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "un-mean") return PolicyId::un_mean;
  if (s == "kn-mean") return PolicyId::kn_mean;
  if (s == "greedy") return PolicyId::greedy;
  if (s == "oracle") return PolicyId::oracle;
  throw ValidationError("unknown policy '" + std::string(name) +
                        "' (expected un-mean|kn-mean|greedy|oracle)");
}

std::string_view to_string(PolicyId p) noexcept {
  switch (p) {
    case PolicyId::un_mean: return "un-mean";
    case PolicyId::kn_mean: return "kn-mean";
    case PolicyId::greedy: return "greedy";
    case PolicyId::oracle: return "oracle";
  }
  return "?";
}

Allocation greedy_allocation(std::span<const NodeParams> nodes, std::span<const double> attack_freq,
                             double budget) {
  const double smoothing = 1.0 / static_cast<double>(nodes.size());
  std::vector<double> scores(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    scores[i] = nodes[i].weight * (attack_freq[i] + smoothing);
  }
  return proportional_allocation(nodes, scores, budget);
}

Allocation oracle_allocation(std::span<const NodeParams> nodes, std::span<const std::uint8_t> attacks,
                             double budget) {
  const std::size_t n = nodes.size();
  Allocation r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = nodes[i].r_min;
  double rem = budget_slack(nodes, budget);
  const double tol = budget_tol(budget);

  std::vector<std::size_t> attacked;
  for (std::size_t i = 0; i < n; ++i) {
    if (attacks[i] != 0) attacked.push_back(i);
  }
  std::stable_sort(attacked.begin(), attacked.end(), [&](std::size_t a, std::size_t b) {
    return nodes[a].weight / nodes[a].span() > nodes[b].weight / nodes[b].span();
  });
  auto top_up = [&](std::size_t i) {
    if (rem >= nodes[i].span() - tol) {
      r[i] = nodes[i].r_max;
      rem -= nodes[i].span();
    } else {
      r[i] += rem;
      rem = 0.0;
    }
  };
  for (std::size_t i : attacked) {
    if (rem <= 0.0) break;
    top_up(i);
  }
  for (std::size_t i = 0; i < n && rem > 0.0; ++i) {
    if (attacks[i] == 0) top_up(i);
  }
  return r;
}

namespace {

void check_trace(const Instance& inst, const AttackTrace& trace) {
  inst.validate();
  if (trace.slots() > 0 && trace.nodes() != inst.n) {
    throw ValidationError("episode: trace width does not match the instance");
  }
}

struct Target {
  Allocation r;
  bool has_epsilon = false;
  double epsilon = 0.0;
};

// Runs the shared slot loop. `decide(t)` gives the Phase I target for slot t
// (0-based); `observe(t, row)` is called after the slot's damage is counted.
template <class Decide, class Observe>
RunMetrics drive(PolicyId id, const Instance& inst, const AttackTrace& trace,
                 const EpisodeOptions& opts, Decide&& decide, Observe&& observe) {
  const auto start = std::chrono::steady_clock::now();
  RunMetrics m;
  m.policy = id;
  m.initial = initial_allocation(inst);
  Allocation prev = m.initial;
  m.slots.reserve(trace.slots());
  for (std::size_t t = 0; t < trace.slots(); ++t) {
    SlotResult slot;
    slot.t = t + 1;
    Target target = decide(t, slot);
    auto net = build_flow_network(prev, target.r, inst.costs, inst.budget, opts.tol_bal);
    slot.plan = min_cost_flow(net);
    slot.realized = apply_transfers(prev, slot.plan, target.r, opts.tol_bal);
    slot.target = std::move(target.r);
    slot.has_epsilon = target.has_epsilon;
    slot.epsilon = target.epsilon;
    slot.transfer_cost = slot.plan.total_cost;
    const auto row = trace.row(t);
    slot.realized_damage = slot_damage(slot.realized, row, inst.nodes);

    m.total_damage += slot.realized_damage;
    m.total_transfer_cost += slot.transfer_cost;
    m.total_epsilon += slot.epsilon;
    observe(t, row);
    prev = slot.realized;
    m.slots.push_back(std::move(slot));
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

void record_belief(SlotResult& slot, const BeliefState& b, std::span<const double> p) {
  const auto err = belief_error(b, p);
  slot.has_belief = true;
  slot.mean_err_max = err.max_abs_mean();
  slot.var_err_max = err.max_abs_var();
}

}  // namespace

RunMetrics un_mean_policy(const Instance& inst, const RiskParams& risk, const AttackTrace& trace,
                          const EpisodeOptions& opts) {
  check_trace(inst, trace);
  BeliefState belief = init_belief(inst.n);
  return drive(
      PolicyId::un_mean, inst, trace, opts,
      [&](std::size_t, SlotResult& slot) {
        record_belief(slot, belief, inst.attack_probs);
        auto res = solve_allocation(belief, risk, inst.nodes, inst.budget, opts.solver);
        return Target{std::move(res.r), true, res.epsilon};
      },
      [&](std::size_t, std::span<const std::uint8_t> row) { belief = update_belief(belief, row); });
}

RunMetrics kn_mean_policy(const Instance& inst, const RiskParams& risk, const AttackTrace& trace,
                          const EpisodeOptions& opts) {
  check_trace(inst, trace);
  const BeliefState belief = known_belief(inst.attack_probs);
  return drive(
      PolicyId::kn_mean, inst, trace, opts,
      [&](std::size_t, SlotResult& slot) {
        record_belief(slot, belief, inst.attack_probs);
        auto res = solve_allocation(belief, risk, inst.nodes, inst.budget, opts.solver);
        return Target{std::move(res.r), true, res.epsilon};
      },
      [](std::size_t, std::span<const std::uint8_t>) {});
}

RunMetrics greedy_policy(const Instance& inst, const AttackTrace& trace, const EpisodeOptions& opts) {
  check_trace(inst, trace);
  std::vector<double> counts(inst.n, 0.0);
  std::vector<double> freq(inst.n, 0.0);
  return drive(
      PolicyId::greedy, inst, trace, opts,
      [&](std::size_t t, SlotResult&) {
        for (std::size_t i = 0; i < inst.n; ++i) {
          freq[i] = t == 0 ? 0.0 : counts[i] / static_cast<double>(t);
        }
        return Target{greedy_allocation(inst.nodes, freq, inst.budget)};
      },
      [&](std::size_t, std::span<const std::uint8_t> row) {
        for (std::size_t i = 0; i < inst.n; ++i) counts[i] += row[i];
      });
}

RunMetrics oracle_policy(const Instance& inst, const RiskParams&, const AttackTrace& trace,
                         const EpisodeOptions& opts) {
  check_trace(inst, trace);
  return drive(
      PolicyId::oracle, inst, trace, opts,
      [&](std::size_t t, SlotResult&) {
        return Target{oracle_allocation(inst.nodes, trace.row(t), inst.budget)};
      },
      [](std::size_t, std::span<const std::uint8_t>) {});
}

RunMetrics run_episode(const Instance& inst, PolicyId policy, const RiskParams& risk,
                       const AttackTrace& trace, const EpisodeOptions& opts) {
  switch (policy) {
    case PolicyId::un_mean: return un_mean_policy(inst, risk, trace, opts);
    case PolicyId::kn_mean: return kn_mean_policy(inst, risk, trace, opts);
    case PolicyId::greedy: return greedy_policy(inst, trace, opts);
    case PolicyId::oracle: return oracle_policy(inst, risk, trace, opts);
  }
  throw ValidationError("unknown policy id");
}

}  // namespace rapa

#include "rapa/model.hpp"

#include <numeric>

namespace rapa {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void Instance::validate() const {
  if (n == 0) throw ValidationError("instance: n must be at least 1");
  if (horizon == 0) throw ValidationError("instance: T must be at least 1");
  if (nodes.size() != n) throw ValidationError("instance: nodes has wrong length");
  if (attack_probs.size() != n) throw ValidationError("instance: attack_probs has wrong length");
  if (costs.size() != n) throw ValidationError("instance: cost matrix has wrong shape");
  if (!std::isfinite(budget)) throw ValidationError("instance: budget must be finite");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nd = nodes[i];
    if (!finite_nonneg(nd.weight)) throw ValidationError("instance: weight must be >= 0");
    if (!(std::isfinite(nd.r_min) && nd.r_min > 0.0))
      throw ValidationError("instance: r_min must be > 0");
    if (!(std::isfinite(nd.r_max) && nd.r_max > nd.r_min))
      throw ValidationError("instance: r_max must exceed r_min");
    const double p = attack_probs[i];
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("instance: attack probability outside [0,1]");
    for (std::size_t j = 0; j < n; ++j) {
      if (!finite_nonneg(costs(i, j))) throw ValidationError("instance: costs must be finite and >= 0");
    }
    if (costs(i, i) != 0.0) throw ValidationError("instance: diagonal costs must be 0");
  }
  if (sum_r_min() > budget + budget_tol(budget)) {
    throw InfeasibleError("instance: budget " + std::to_string(budget) +
                          " is below the sum of r_min " + std::to_string(sum_r_min()));
  }
}

double Instance::sum_r_min() const noexcept {
  return std::accumulate(nodes.begin(), nodes.end(), 0.0,
                         [](double s, const NodeParams& nd) { return s + nd.r_min; });
}

double Instance::sum_r_max() const noexcept {
  return std::accumulate(nodes.begin(), nodes.end(), 0.0,
                         [](double s, const NodeParams& nd) { return s + nd.r_max; });
}

void AttackTrace::set(std::size_t t, std::size_t i, int value) {
  if (value != 0 && value != 1) throw ValidationError("attack trace entries must be 0 or 1");
  y_[t * n_ + i] = static_cast<std::uint8_t>(value);
}

RiskParams::RiskParams(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  kappa_ = std::sqrt((1.0 - alpha) / alpha);
}

double slot_damage(std::span<const double> alloc, std::span<const std::uint8_t> attacks,
                   std::span<const NodeParams> nodes) {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    total += nodes[i].weight * damage(nodes[i], alloc[i], attacks[i]);
  }
  return total;
}

double plan_cost(const TransferPlan& plan, const CostMatrix& costs) {
  double total = 0.0;
  for (const auto& f : plan.flows) total += costs(f.from, f.to) * f.amount;
  return total;
}

bool is_feasible(std::span<const double> alloc, std::span<const NodeParams> nodes, double budget,
                 double tol) {
  if (alloc.size() != nodes.size()) return false;
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(alloc[i] >= nodes[i].r_min - tol && alloc[i] <= nodes[i].r_max + tol)) return false;
    sum += alloc[i];
  }
  return sum <= budget + tol;
}

Allocation proportional_allocation(std::span<const NodeParams> nodes, std::span<const double> scores,
                                   double budget) {
  const std::size_t n = nodes.size();
  Allocation r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = nodes[i].r_min;
  double slack = budget_slack(nodes, budget);

  std::vector<bool> capped(n, false);
  // Each pass either places all remaining slack or caps at least one node.
  for (std::size_t pass = 0; pass <= n && slack > 0.0; ++pass) {
    double score_sum = 0.0;
    std::size_t open = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (capped[i]) continue;
      score_sum += scores[i];
      ++open;
    }
    if (open == 0) break;

    auto share = [&](std::size_t i) {
      return score_sum > 0.0 ? scores[i] / score_sum : 1.0 / static_cast<double>(open);
    };
    bool any_capped = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!capped[i] && r[i] + share(i) * slack >= nodes[i].r_max - budget_tol(budget)) {
        capped[i] = true;
        any_capped = true;
      }
    }
    if (!any_capped) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!capped[i]) r[i] += share(i) * slack;
      }
      slack = 0.0;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (capped[i] && r[i] < nodes[i].r_max) {
        slack -= nodes[i].r_max - r[i];
        r[i] = nodes[i].r_max;
      }
    }
  }
  return r;
}

double budget_slack(std::span<const NodeParams> nodes, double budget) {
  double sum_min = 0.0;
  for (const auto& nd : nodes) sum_min += nd.r_min;
  const double slack = budget - sum_min;
  if (slack >= 0.0) return slack;
  if (slack >= -budget_tol(budget)) return 0.0;
  throw InfeasibleError("budget " + std::to_string(budget) + " is below the sum of r_min " +
                        std::to_string(sum_min));
}

Allocation initial_allocation(const Instance& inst) {
  std::vector<double> weights(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) weights[i] = inst.nodes[i].weight;
  return proportional_allocation(inst.nodes, weights, inst.budget);
}

}  // namespace rapa

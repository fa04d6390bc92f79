#ifndef RAPA_MODEL_HPP
#define RAPA_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rapa {

/// Thrown when input data violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a budget cannot satisfy the per-node minimum resource levels,
/// or a transfer network cannot meet its deficits.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-node damage parameters. `r_min` is the level at or below which an
/// attacked node takes full damage, `r_max` the level at which it takes none.
struct NodeParams {
  double weight = 1.0;
  double r_min = 1.0;
  double r_max = 2.0;

  [[nodiscard]] double span() const noexcept { return r_max - r_min; }

  bool operator==(const NodeParams&) const = default;
};

/// Dense row-major n x n matrix of per-unit transfer costs.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }

  bool operator==(const CostMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Static problem data for one scenario.
struct Instance {
  std::size_t n = 0;
  std::size_t horizon = 0;  // number of slots T
  double budget = 0.0;      // R
  std::vector<NodeParams> nodes;
  CostMatrix costs;
  std::vector<double> attack_probs;  // hidden from learning policies
  std::uint64_t seed = 0;

  /// Checks every invariant; throws ValidationError, or InfeasibleError when
  /// the budget is below the sum of minimum levels.
  void validate() const;

  [[nodiscard]] double sum_r_min() const noexcept;
  [[nodiscard]] double sum_r_max() const noexcept;

  bool operator==(const Instance&) const = default;
};

/// Resource vector for one slot.
using Allocation = std::vector<double>;

/// Row t holds the attack indicators for slot t+1; entries are 0 or 1.
class AttackTrace {
 public:
  AttackTrace() = default;
  AttackTrace(std::size_t slots, std::size_t n) : slots_(slots), n_(n), y_(slots * n, 0) {}

  [[nodiscard]] std::size_t slots() const noexcept { return slots_; }
  [[nodiscard]] std::size_t nodes() const noexcept { return n_; }
  [[nodiscard]] std::span<const std::uint8_t> row(std::size_t t) const {
    return {y_.data() + t * n_, n_};
  }
  [[nodiscard]] std::uint8_t at(std::size_t t, std::size_t i) const { return y_[t * n_ + i]; }
  /// Throws ValidationError unless `value` is 0 or 1.
  void set(std::size_t t, std::size_t i, int value);

  bool operator==(const AttackTrace&) const = default;

 private:
  std::size_t slots_ = 0;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> y_;
};

struct Transfer {
  std::size_t from = 0;
  std::size_t to = 0;
  double amount = 0.0;
};

struct TransferPlan {
  std::vector<Transfer> flows;
  double total_cost = 0.0;
};

/// Risk level alpha of the chance constraint and its Cantelli coefficient
/// kappa = sqrt((1 - alpha) / alpha).
class RiskParams {
 public:
  explicit RiskParams(double alpha);

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double kappa() const noexcept { return kappa_; }

 private:
  double alpha_;
  double kappa_;
};

/// Damage in [0, 1] of a node holding `r` units; zero unless attacked.
[[nodiscard]] inline double damage(const NodeParams& node, double r, int attacked) noexcept {
  if (attacked == 0) return 0.0;
  const double frac = (node.r_max - r) / node.span();
  return std::clamp(frac, 0.0, 1.0);
}

[[nodiscard]] inline double expected_damage(const NodeParams& node, double r, double p) noexcept {
  return p * damage(node, r, 1);
}

/// Weighted realized damage of one slot.
[[nodiscard]] double slot_damage(std::span<const double> alloc, std::span<const std::uint8_t> attacks,
                                 std::span<const NodeParams> nodes);

[[nodiscard]] double plan_cost(const TransferPlan& plan, const CostMatrix& costs);

/// True when r_min_i <= r_i <= r_max_i (with `tol` slack) and sum r <= budget + tol.
[[nodiscard]] bool is_feasible(std::span<const double> alloc, std::span<const NodeParams> nodes,
                               double budget, double tol = 1e-9);

/// Importance-proportional allocation r_i = r_min_i + share_i * (R - sum r_min),
/// capped at r_max with the excess redistributed among uncapped nodes.
[[nodiscard]] Allocation proportional_allocation(std::span<const NodeParams> nodes,
                                                 std::span<const double> scores, double budget);

[[nodiscard]] Allocation initial_allocation(const Instance& inst);

/// Absolute slack used when comparing resource sums against a budget.
[[nodiscard]] inline double budget_tol(double budget) noexcept {
  return 1e-12 * std::max(1.0, std::abs(budget));
}

/// R - sum r_min. Rounding-level negatives are clamped to 0; a real shortfall
/// throws InfeasibleError.
[[nodiscard]] double budget_slack(std::span<const NodeParams> nodes, double budget);

}  // namespace rapa

#endif  // RAPA_MODEL_HPP

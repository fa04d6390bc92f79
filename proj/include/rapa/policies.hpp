#ifndef RAPA_POLICIES_HPP
#define RAPA_POLICIES_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rapa/allocation.hpp"
#include "rapa/belief.hpp"
#include "rapa/model.hpp"
#include "rapa/transfer.hpp"

namespace rapa {

enum class PolicyId { un_mean, kn_mean, greedy, oracle };

inline constexpr PolicyId kAllPolicies[] = {PolicyId::un_mean, PolicyId::kn_mean, PolicyId::greedy,
                                            PolicyId::oracle};

/// Accepts "un-mean" or "un_mean" style names.
[[nodiscard]] PolicyId parse_policy(std::string_view name);
[[nodiscard]] std::string_view to_string(PolicyId p) noexcept;

struct SlotResult {
  std::size_t t = 0;  // 1-based slot index
  Allocation target;
  Allocation realized;
  TransferPlan plan;
  bool has_epsilon = false;
  double epsilon = 0.0;
  double realized_damage = 0.0;
  double transfer_cost = 0.0;
  bool has_belief = false;
  double mean_err_max = 0.0;  // belief used in this slot vs the true p
  double var_err_max = 0.0;
};

struct RunMetrics {
  PolicyId policy = PolicyId::un_mean;
  Allocation initial;
  std::vector<SlotResult> slots;
  double total_damage = 0.0;
  double total_transfer_cost = 0.0;
  double total_epsilon = 0.0;
  double wall_seconds = 0.0;
};

struct EpisodeOptions {
  SolverOptions solver;
  double tol_bal = kDefaultTolBal;
};

/// Learns attack statistics online: Phase I on the current belief, Phase II
/// from the previous realized allocation, observe, update. The episode length
/// is the number of trace rows.
[[nodiscard]] RunMetrics un_mean_policy(const Instance& inst, const RiskParams& risk,
                                        const AttackTrace& trace, const EpisodeOptions& opts = {});

/// As un_mean_policy with the belief fixed to the true mean and p(1-p).
[[nodiscard]] RunMetrics kn_mean_policy(const Instance& inst, const RiskParams& risk,
                                        const AttackTrace& trace, const EpisodeOptions& opts = {});

[[nodiscard]] RunMetrics greedy_policy(const Instance& inst, const AttackTrace& trace,
                                       const EpisodeOptions& opts = {});

/// Sees each slot's attacks before allocating. The risk parameter is unused.
[[nodiscard]] RunMetrics oracle_policy(const Instance& inst, const RiskParams& risk,
                                       const AttackTrace& trace, const EpisodeOptions& opts = {});

[[nodiscard]] RunMetrics run_episode(const Instance& inst, PolicyId policy, const RiskParams& risk,
                                     const AttackTrace& trace, const EpisodeOptions& opts = {});

/// Greedy target: r_min plus the slack split by score w_i (freq_i + 1/n),
/// capped at r_max with redistribution.
[[nodiscard]] Allocation greedy_allocation(std::span<const NodeParams> nodes,
                                           std::span<const double> attack_freq, double budget);

/// Exact minimizer of the realized slot damage when the attacks are known:
/// attacked nodes are filled to r_max by decreasing w_i / (r_max_i - r_min_i),
/// any remaining budget goes to the rest in index order.
[[nodiscard]] Allocation oracle_allocation(std::span<const NodeParams> nodes,
                                           std::span<const std::uint8_t> attacks, double budget);

}  // namespace rapa

#endif  // RAPA_POLICIES_HPP

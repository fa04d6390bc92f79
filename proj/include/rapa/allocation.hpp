#ifndef RAPA_ALLOCATION_HPP
#define RAPA_ALLOCATION_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rapa/belief.hpp"
#include "rapa/model.hpp"

namespace rapa {

/// How the variance enters the deterministic surrogate.
///   paper:   h^2 = sum_i Var_i * v_i
///   squared: h^2 = sum_i Var_i * v_i^2
enum class VarianceForm { paper, squared };

[[nodiscard]] VarianceForm parse_variance_form(std::string_view s);
[[nodiscard]] std::string_view to_string(VarianceForm f) noexcept;

struct SurrogateTerms {
  std::vector<double> v;  // v_i = w_i (r_max_i - r_i) / (r_max_i - r_min_i), clamped to [0, w_i]
  double linear = 0.0;    // sum_i mean_i v_i
  double h = 0.0;
  double epsilon = 0.0;   // linear + kappa * h
};

[[nodiscard]] SurrogateTerms surrogate(std::span<const double> r, const BeliefState& belief,
                                       const RiskParams& risk, std::span<const NodeParams> nodes,
                                       VarianceForm form = VarianceForm::paper);

struct SolverOptions {
  VarianceForm variance_form = VarianceForm::paper;
  double tol_h = 1e-9;
  int max_iterations = 200;
  /// Up to this many nodes the paper-form solver also sweeps every ordering
  /// of the parametric knapsack, which certifies the global optimum.
  std::size_t exact_max_n = 256;
};

struct AllocationResult {
  Allocation r;
  double epsilon = 0.0;
};

/// Minimizes the surrogate epsilon over sum r <= budget, r_min <= r <= r_max.
/// Throws InfeasibleError when budget < sum r_min.
[[nodiscard]] AllocationResult solve_allocation(const BeliefState& belief, const RiskParams& risk,
                                                std::span<const NodeParams> nodes, double budget,
                                                const SolverOptions& opts = {});

/// Exhaustive search over the grid r_i in {r_min_i + k * grid_step} (with r_max_i
/// appended). Points over budget are skipped; leftover budget on a grid point is
/// poured into nodes in index order up to r_max. Throws ValidationError when the
/// grid has more than `max_points` points.
[[nodiscard]] AllocationResult brute_force_allocation(const BeliefState& belief,
                                                      const RiskParams& risk,
                                                      std::span<const NodeParams> nodes,
                                                      double budget, double grid_step,
                                                      VarianceForm form = VarianceForm::paper,
                                                      std::size_t max_points = 20'000'000);

/// Upper bound on how far the grid-best epsilon can sit above the true optimum.
[[nodiscard]] double grid_resolution_bound(const BeliefState& belief, const RiskParams& risk,
                                           std::span<const NodeParams> nodes, double grid_step,
                                           VarianceForm form = VarianceForm::paper);

}  // namespace rapa

#endif  // RAPA_ALLOCATION_HPP

#ifndef RAPA_TRANSFER_HPP
#define RAPA_TRANSFER_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "rapa/model.hpp"

namespace rapa {

inline constexpr double kDefaultTolBal = 1e-9;

struct FlowArc {
  std::size_t from = 0;
  std::size_t to = 0;
  double capacity = 0.0;
  double unit_cost = 0.0;
};

/// Augmented transfer network. Vertex 0 is the super-source, vertex n+1 the
/// super-sink and real node i (0-based) is vertex i+1. The source feeds every
/// surplus node (supply > tol_bal) and every deficit node (supply < -tol_bal)
/// drains into the sink; every ordered pair of real nodes is linked with
/// capacity R at its transfer cost.
struct FlowNetwork {
  std::size_t n = 0;
  std::vector<FlowArc> arcs;
  std::vector<double> supply;  // prev_i - target_i
  double tol_bal = kDefaultTolBal;

  [[nodiscard]] std::size_t source() const noexcept { return 0; }
  [[nodiscard]] std::size_t sink() const noexcept { return n + 1; }
  [[nodiscard]] std::size_t vertex_count() const noexcept { return n + 2; }
  [[nodiscard]] std::vector<std::size_t> surplus_nodes() const;
  [[nodiscard]] std::vector<std::size_t> deficit_nodes() const;
  [[nodiscard]] double total_surplus() const;
  [[nodiscard]] double total_deficit() const;
};

/// Throws ValidationError on size mismatch or a negative cost, InfeasibleError
/// when deficits exceed surpluses by more than tol_bal.
[[nodiscard]] FlowNetwork build_flow_network(std::span<const double> prev, std::span<const double> target,
                                             const CostMatrix& costs, double budget,
                                             double tol_bal = kDefaultTolBal);

/// Successive shortest paths with node potentials (Dijkstra on reduced costs).
/// Saturates every sink arc; only real-to-real flows are reported.
[[nodiscard]] TransferPlan min_cost_flow(const FlowNetwork& net);

/// r_i = prev_i + inflow_i - outflow_i. When `target` is given, deficit nodes
/// that land within tol_bal of their target are set to it exactly.
[[nodiscard]] Allocation apply_transfers(std::span<const double> prev, const TransferPlan& plan,
                                         std::span<const double> target = {},
                                         double tol_bal = kDefaultTolBal);

}  // namespace rapa

#endif  // RAPA_TRANSFER_HPP

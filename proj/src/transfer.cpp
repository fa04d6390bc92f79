#include "rapa/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rapa {

std::vector<std::size_t> FlowNetwork::surplus_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (supply[i] > tol_bal) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FlowNetwork::deficit_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (supply[i] < -tol_bal) out.push_back(i);
  }
  return out;
}

double FlowNetwork::total_surplus() const {
  double s = 0.0;
  for (double x : supply) {
    if (x > tol_bal) s += x;
  }
  return s;
}

double FlowNetwork::total_deficit() const {
  double s = 0.0;
  for (double x : supply) {
    if (x < -tol_bal) s -= x;
  }
  return s;
}

FlowNetwork build_flow_network(std::span<const double> prev, std::span<const double> target,
                               const CostMatrix& costs, double budget, double tol_bal) {
  const std::size_t n = prev.size();
  if (target.size() != n || costs.size() != n) {
    throw ValidationError("transfer: allocation and cost sizes do not match");
  }
  FlowNetwork net;
  net.n = n;
  net.tol_bal = tol_bal;
  net.supply.resize(n);
  for (std::size_t i = 0; i < n; ++i) net.supply[i] = prev[i] - target[i];

  for (std::size_t i = 0; i < n; ++i) {
    const double s = net.supply[i];
    if (s > tol_bal) {
      net.arcs.push_back({net.source(), i + 1, s, 0.0});
    } else if (s < -tol_bal) {
      net.arcs.push_back({i + 1, net.sink(), -s, 0.0});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = costs(i, j);
      if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("transfer: costs must be finite and >= 0");
      net.arcs.push_back({i + 1, j + 1, budget, c});
    }
  }
  if (net.total_deficit() > net.total_surplus() + tol_bal) {
    throw InfeasibleError("transfer: total deficit " + std::to_string(net.total_deficit()) +
                          " exceeds total surplus " + std::to_string(net.total_surplus()));
  }
  return net;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Residual capacity at or below this is treated as exhausted.
constexpr double kResidualEps = 1e-12;

struct Edge {
  std::size_t to;
  std::size_t rev;
  double residual;
  double cost;
  double flow;
  bool forward;
  std::size_t arc;  // index into FlowNetwork::arcs for forward edges
};

}  // namespace

TransferPlan min_cost_flow(const FlowNetwork& net) {
  for (const auto& arc : net.arcs) {
    if (arc.unit_cost < 0.0) throw ValidationError("transfer: negative arc cost");
  }
  if (net.deficit_nodes().empty()) return {};

  const std::size_t v_count = net.vertex_count();
  std::vector<std::vector<Edge>> g(v_count);
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const auto& arc = net.arcs[a];
    g[arc.from].push_back({arc.to, g[arc.to].size(), arc.capacity, arc.unit_cost, 0.0, true, a});
    g[arc.to].push_back({arc.from, g[arc.from].size() - 1, 0.0, -arc.unit_cost, 0.0, false, a});
  }

  const std::size_t s = net.source();
  const std::size_t t = net.sink();
  double demand = net.total_deficit();

  // Costs are nonnegative, so zero potentials are feasible to start.
  std::vector<double> pot(v_count, 0.0);
  std::vector<double> dist(v_count);
  std::vector<bool> done(v_count);
  std::vector<std::size_t> prev_v(v_count);
  std::vector<std::size_t> prev_e(v_count);

  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), false);
    dist[s] = 0.0;
    // Dense Dijkstra: the real-node subgraph is complete.
    while (true) {
      std::size_t u = v_count;
      double best = kInf;
      for (std::size_t v = 0; v < v_count; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == v_count) break;
      done[u] = true;
      if (u == t) break;
      for (std::size_t k = 0; k < g[u].size(); ++k) {
        const Edge& e = g[u][k];
        if (e.residual <= kResidualEps || done[e.to]) continue;
        const double reduced = std::max(e.cost + pot[u] - pot[e.to], 0.0);
        if (dist[u] + reduced < dist[e.to]) {
          dist[e.to] = dist[u] + reduced;
          prev_v[e.to] = u;
          prev_e[e.to] = k;
        }
      }
    }
    if (!done[t]) break;

    for (std::size_t v = 0; v < v_count; ++v) {
      if (done[v]) pot[v] += dist[v] - dist[t];
    }

    double push = kInf;
    for (std::size_t v = t; v != s; v = prev_v[v]) {
      push = std::min(push, g[prev_v[v]][prev_e[v]].residual);
    }
    for (std::size_t v = t; v != s; v = prev_v[v]) {
      Edge& e = g[prev_v[v]][prev_e[v]];
      Edge& back = g[v][e.rev];
      e.residual -= push;
      back.residual += push;
      if (e.forward) {
        e.flow += push;
      } else {
        back.flow -= push;
      }
    }
    demand -= push;
  }

  if (demand > net.tol_bal) {
    throw InfeasibleError("transfer: unmet deficit " + std::to_string(demand));
  }

  TransferPlan plan;
  for (std::size_t u = 1; u <= net.n; ++u) {
    for (const Edge& e : g[u]) {
      if (!e.forward || e.to == t || e.flow <= 0.0) continue;
      plan.flows.push_back({u - 1, e.to - 1, e.flow});
      plan.total_cost += net.arcs[e.arc].unit_cost * e.flow;
    }
  }
  std::sort(plan.flows.begin(), plan.flows.end(), [](const Transfer& a, const Transfer& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  return plan;
}

Allocation apply_transfers(std::span<const double> prev, const TransferPlan& plan,
                           std::span<const double> target, double tol_bal) {
  Allocation r(prev.begin(), prev.end());
  for (const auto& f : plan.flows) {
    r[f.from] -= f.amount;
    r[f.to] += f.amount;
  }
  if (!target.empty()) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const bool deficit = target[i] - prev[i] > tol_bal;
      if (deficit && std::abs(r[i] - target[i]) <= tol_bal) r[i] = target[i];
    }
  }
  return r;
}

}  // namespace rapa

#ifndef RAPA_TEST_HELPERS_HPP
#define RAPA_TEST_HELPERS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "rapa/model.hpp"

namespace testutil {

inline std::vector<rapa::NodeParams> random_nodes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> w(0.2, 3.0), lo(0.5, 3.0), span(0.5, 6.0);
  std::vector<rapa::NodeParams> nodes(n);
  for (auto& nd : nodes) {
    nd.weight = w(rng);
    nd.r_min = lo(rng);
    nd.r_max = nd.r_min + span(rng);
  }
  return nodes;
}

inline rapa::CostMatrix random_costs(std::mt19937_64& rng, std::size_t n, double lo = 0.1, double hi = 2.0) {
  std::uniform_real_distribution<double> c(lo, hi);
  rapa::CostMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) m(i, j) = c(rng);
    }
  }
  return m;
}

inline rapa::Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t horizon) {
  rapa::Instance inst;
  inst.n = n;
  inst.horizon = horizon;
  inst.nodes = random_nodes(rng, n);
  inst.costs = random_costs(rng, n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  inst.attack_probs.resize(n);
  for (auto& p : inst.attack_probs) p = 0.6 * u(rng);
  inst.budget = inst.sum_r_min() + u(rng) * (inst.sum_r_max() - inst.sum_r_min());
  inst.seed = rng();
  return inst;
}

inline rapa::AttackTrace random_trace(std::mt19937_64& rng, const std::vector<double>& p, std::size_t slots) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  rapa::AttackTrace trace(slots, p.size());
  for (std::size_t t = 0; t < slots; ++t) {
    for (std::size_t i = 0; i < p.size(); ++i) trace.set(t, i, u(rng) < p[i] ? 1 : 0);
  }
  return trace;
}

inline double sum(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

}  // namespace testutil

#endif  // RAPA_TEST_HELPERS_HPP

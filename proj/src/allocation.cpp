#include "rapa/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rapa {

VarianceForm parse_variance_form(std::string_view s) {
  if (s == "paper") return VarianceForm::paper;
  if (s == "squared") return VarianceForm::squared;
  throw ValidationError("unknown variance_form '" + std::string(s) + "' (expected paper|squared)");
}

std::string_view to_string(VarianceForm f) noexcept {
  return f == VarianceForm::paper ? "paper" : "squared";
}

SurrogateTerms surrogate(std::span<const double> r, const BeliefState& belief, const RiskParams& risk,
                         std::span<const NodeParams> nodes, VarianceForm form) {
  SurrogateTerms s;
  s.v.resize(nodes.size());
  double h2 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& nd = nodes[i];
    const double v = std::clamp(nd.weight * (nd.r_max - r[i]) / nd.span(), 0.0, nd.weight);
    s.v[i] = v;
    s.linear += belief.mean[i] * v;
    h2 += belief.variance[i] * (form == VarianceForm::paper ? v : v * v);
  }
  s.h = std::sqrt(std::max(h2, 0.0));
  s.epsilon = s.linear + risk.kappa() * s.h;
  return s;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The problem is handled in terms of the extra resource x_i = r_i - r_min_i,
// x_i in [0, cap_i], sum x <= slack. v_i = w_i - k_i x_i with k_i = w_i / cap_i.
class Phase1 {
 public:
  Phase1(const BeliefState& belief, const RiskParams& risk, std::span<const NodeParams> nodes,
         double budget, const SolverOptions& opts)
      : nodes_(nodes), opts_(opts), kappa_(risk.kappa()), n_(nodes.size()) {
    if (belief.size() != n_) throw ValidationError("allocation: belief size does not match nodes");
    cap_.resize(n_);
    k_.resize(n_);
    a_.resize(n_);
    b_.resize(n_);
    tol_ = budget_tol(budget);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& nd = nodes[i];
      if (!(nd.r_max > nd.r_min)) throw ValidationError("allocation: r_max must exceed r_min");
      cap_[i] = nd.span();
      k_[i] = nd.weight / cap_[i];
      a_[i] = belief.mean[i] * k_[i];
      b_[i] = belief.variance[i] * k_[i];
    }
    slack_ = budget_slack(nodes, budget);
    mean_ = belief.mean;
    var_ = belief.variance;
  }

  AllocationResult solve() {
    std::vector<std::vector<double>> starts;
    starts.push_back(extras_of(initial_scores(/*uniform=*/false)));
    starts.push_back(extras_of(initial_scores(/*uniform=*/true)));
    starts.push_back(std::vector<double>(n_, 0.0));

    std::vector<double> best;
    double best_f = kInf;
    auto consider = [&](std::vector<double> x, double f) {
      if (f < best_f) {
        best_f = f;
        best = std::move(x);
      }
    };

    if (opts_.variance_form == VarianceForm::paper) {
      for (auto& x : starts) {
        double f = fixed_point(x);
        consider(std::move(x), f);
      }
      if (n_ <= opts_.exact_max_n) {
        auto x = parametric_sweep();
        double f = fixed_point(x);
        consider(std::move(x), f);
      }
    } else {
      for (auto& x : starts) {
        double f = alternating(x);
        consider(std::move(x), f);
      }
    }

    AllocationResult res;
    res.r.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      res.r[i] = best[i] >= cap_[i] ? nodes_[i].r_max : nodes_[i].r_min + best[i];
    }
    res.epsilon = objective(best);
    return res;
  }

 private:
  std::vector<double> initial_scores(bool uniform) const {
    std::vector<double> s(n_, 1.0);
    if (!uniform) {
      for (std::size_t i = 0; i < n_; ++i) s[i] = nodes_[i].weight;
    }
    return s;
  }

  std::vector<double> extras_of(const std::vector<double>& scores) const {
    double budget = slack_;
    for (const auto& nd : nodes_) budget += nd.r_min;
    auto r = proportional_allocation(nodes_, scores, budget);
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = std::clamp(r[i] - nodes_[i].r_min, 0.0, cap_[i]);
    return x;
  }

  double v_of(std::size_t i, double x) const {
    const auto& nd = nodes_[i];
    return std::clamp(nd.weight * (cap_[i] - x) / cap_[i], 0.0, nd.weight);
  }

  // Returns (linear term, h^2).
  std::pair<double, double> terms(const std::vector<double>& x) const {
    double lin = 0.0;
    double h2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = v_of(i, x[i]);
      lin += mean_[i] * v;
      h2 += var_[i] * (opts_.variance_form == VarianceForm::paper ? v : v * v);
    }
    return {lin, std::max(h2, 0.0)};
  }

  double objective(const std::vector<double>& x) const {
    auto [lin, h2] = terms(x);
    return lin + kappa_ * std::sqrt(h2);
  }

  // True when node a precedes node b in knapsack order at multiplier lambda.
  bool precedes(std::size_t a, std::size_t b, double lambda) const {
    if (lambda == kInf) {
      if (b_[a] != b_[b]) return b_[a] > b_[b];
      if (a_[a] != a_[b]) return a_[a] > a_[b];
      return a < b;
    }
    const double ka = a_[a] + lambda * b_[a];
    const double kb = a_[b] + lambda * b_[b];
    if (ka != kb) return ka > kb;
    return a < b;
  }

  void sort_order(std::vector<std::size_t>& order, double lambda) const {
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return precedes(a, b, lambda); });
  }

  // Continuous knapsack: fill nodes completely in the given order.
  std::vector<double> fill(const std::vector<std::size_t>& order) const {
    std::vector<double> x(n_, 0.0);
    double rem = slack_;
    for (std::size_t i : order) {
      if (rem <= 0.0) break;
      const double take = rem >= cap_[i] - tol_ ? cap_[i] : rem;
      x[i] = take;
      rem -= take;
    }
    return x;
  }

  // Majorize-minimize: epsilon is concave in x, so minimizing its linearization
  // (a continuous knapsack with densities a_i + kappa/(2h) * b_i) never increases it.
  double fixed_point(std::vector<double>& x) const {
    double f = objective(x);
    double h = std::sqrt(terms(x).second);
    std::vector<std::size_t> order(n_);
    for (int it = 0; it < opts_.max_iterations; ++it) {
      const double lambda = h > 1e-15 ? kappa_ / (2.0 * h) : kInf;
      std::iota(order.begin(), order.end(), std::size_t{0});
      sort_order(order, lambda);
      auto next = fill(order);
      const double f_next = objective(next);
      if (!(f_next < f)) break;
      const double h_next = std::sqrt(terms(next).second);
      x = std::move(next);
      f = f_next;
      if (std::abs(h_next - h) <= opts_.tol_h) break;
      h = h_next;
    }
    return f;
  }

  // Every minimizer of the concave surrogate over this polytope is a knapsack
  // solution for some multiplier lambda in [0, inf]. The knapsack order only
  // changes where two density lines a_i + lambda b_i cross, so one probe per
  // interval between crossings (plus lambda = inf) covers every candidate.
  std::vector<double> parametric_sweep() const {
    std::vector<double> cross;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double db = b_[i] - b_[j];
        if (db == 0.0) continue;
        const double lam = (a_[j] - a_[i]) / db;
        if (lam > 0.0 && std::isfinite(lam)) cross.push_back(lam);
      }
    }
    std::sort(cross.begin(), cross.end());
    cross.erase(std::unique(cross.begin(), cross.end()), cross.end());

    std::vector<double> probes;
    if (cross.empty()) {
      probes.push_back(1.0);
    } else {
      probes.push_back(cross.front() / 2.0);
      for (std::size_t k = 0; k + 1 < cross.size(); ++k) {
        probes.push_back(0.5 * (cross[k] + cross[k + 1]));
      }
      probes.push_back(cross.back() * 2.0);
    }
    probes.push_back(kInf);

    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> best;
    double best_f = kInf;
    for (double lam : probes) {
      // Consecutive probes differ by a few adjacent swaps; insertion sort is near linear.
      for (std::size_t k = 1; k < n_; ++k) {
        const std::size_t cur = order[k];
        std::size_t pos = k;
        while (pos > 0 && precedes(cur, order[pos - 1], lam)) {
          order[pos] = order[pos - 1];
          --pos;
        }
        order[pos] = cur;
      }
      auto x = fill(order);
      const double f = objective(x);
      if (f < best_f) {
        best_f = f;
        best = std::move(x);
      }
    }
    return best;
  }

  // Squared form: minimize sum a v + c sum s v^2 subject to budget and box,
  // by bisection on the budget multiplier.
  std::vector<double> separable_quadratic(double c) const {
    auto x_at = [&](std::size_t i, double mu, bool upper) {
      if (var_[i] > 0.0 && k_[i] > 0.0 && c > 0.0) {
        const double v = std::clamp((mu / k_[i] - mean_[i]) / (2.0 * c * var_[i]), 0.0,
                                    nodes_[i].weight);
        return std::clamp(cap_[i] * (1.0 - v / nodes_[i].weight), 0.0, cap_[i]);
      }
      const double g = a_[i];
      if (mu < g) return cap_[i];
      if (mu > g) return 0.0;
      return upper ? cap_[i] : 0.0;
    };
    auto total = [&](double mu) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += x_at(i, mu, true);
      return s;
    };

    std::vector<double> x(n_);
    if (total(0.0) <= slack_) {
      for (std::size_t i = 0; i < n_; ++i) x[i] = x_at(i, 0.0, true);
      return x;
    }
    double lo = 0.0;
    double hi = 1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      hi = std::max(hi, k_[i] * (mean_[i] + 2.0 * c * var_[i] * nodes_[i].weight) + 1.0);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (total(mid) <= slack_) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    double rem = slack_;
    for (std::size_t i = 0; i < n_; ++i) {
      x[i] = x_at(i, hi, true);
      rem -= x[i];
    }
    for (std::size_t i = 0; i < n_ && rem > 0.0; ++i) {
      const double add = std::min(std::max(x_at(i, lo, true) - x[i], 0.0), rem);
      x[i] += add;
      rem -= add;
    }
    return x;
  }

  // Alternating minimization of g(x, h) = a.v + kappa (q(x) / (2h) + h / 2),
  // whose minimum over h is the squared-form surrogate.
  double alternating(std::vector<double>& x) const {
    double f = objective(x);
    for (int it = 0; it < std::max(opts_.max_iterations, 500); ++it) {
      const double h = std::sqrt(terms(x).second);
      const double c = kappa_ / (2.0 * std::max(h, 1e-12));
      auto next = separable_quadratic(c);
      const double f_next = objective(next);
      if (!(f_next < f)) break;
      const bool done = f - f_next <= 1e-14 * (1.0 + std::abs(f));
      x = std::move(next);
      f = f_next;
      if (done) break;
    }
    return f;
  }

  std::span<const NodeParams> nodes_;
  SolverOptions opts_;
  double kappa_;
  std::size_t n_;
  double slack_ = 0.0;
  double tol_ = 0.0;
  std::vector<double> cap_, k_, a_, b_, mean_, var_;
};

}  // namespace

AllocationResult solve_allocation(const BeliefState& belief, const RiskParams& risk,
                                  std::span<const NodeParams> nodes, double budget,
                                  const SolverOptions& opts) {
  if (nodes.empty()) throw ValidationError("allocation: no nodes");
  Phase1 solver(belief, risk, nodes, budget, opts);
  auto res = solver.solve();
  res.epsilon = surrogate(res.r, belief, risk, nodes, opts.variance_form).epsilon;
  return res;
}

AllocationResult brute_force_allocation(const BeliefState& belief, const RiskParams& risk,
                                        std::span<const NodeParams> nodes, double budget,
                                        double grid_step, VarianceForm form,
                                        std::size_t max_points) {
  const std::size_t n = nodes.size();
  if (n == 0) throw ValidationError("brute force: no nodes");
  if (!(grid_step > 0.0)) throw ValidationError("brute force: grid_step must be > 0");
  (void)budget_slack(nodes, budget);

  std::vector<std::vector<double>> grid(n);
  double points = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nd = nodes[i];
    const double steps = std::floor(nd.span() / grid_step);
    points *= steps + 2.0;
    if (points > static_cast<double>(max_points)) {
      throw ValidationError("brute force: grid exceeds " + std::to_string(max_points) + " points");
    }
    for (double k = 0.0; k <= steps; k += 1.0) {
      const double r = nd.r_min + k * grid_step;
      if (r < nd.r_max) grid[i].push_back(r);
    }
    grid[i].push_back(nd.r_max);
  }

  AllocationResult best;
  best.epsilon = kInf;
  std::vector<double> r(n);
  std::vector<double> filled(n);

  auto visit_leaf = [&](double sum) {
    filled = r;
    double rem = budget - sum;
    for (std::size_t i = 0; i < n && rem > 0.0; ++i) {
      const double add = std::min(nodes[i].r_max - filled[i], rem);
      filled[i] += add;
      rem -= add;
    }
    double lin = 0.0;
    double h2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& nd = nodes[i];
      const double v = std::clamp(nd.weight * (nd.r_max - filled[i]) / nd.span(), 0.0, nd.weight);
      lin += belief.mean[i] * v;
      h2 += belief.variance[i] * (form == VarianceForm::paper ? v : v * v);
    }
    const double eps = lin + risk.kappa() * std::sqrt(std::max(h2, 0.0));
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.r = filled;
    }
  };

  // Remaining minimum budget needed by nodes after index i.
  std::vector<double> tail_min(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail_min[i] = tail_min[i + 1] + nodes[i].r_min;

  auto recurse = [&](auto&& self, std::size_t i, double sum) -> void {
    if (i == n) {
      visit_leaf(sum);
      return;
    }
    for (double g : grid[i]) {
      if (sum + g + tail_min[i + 1] > budget + 1e-12) break;
      r[i] = g;
      self(self, i + 1, sum + g);
    }
  };
  recurse(recurse, 0, 0.0);
  return best;
}

double grid_resolution_bound(const BeliefState& belief, const RiskParams& risk,
                             std::span<const NodeParams> nodes, double grid_step,
                             VarianceForm form) {
  double lin = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& nd = nodes[i];
    const double dv = std::min(nd.weight * grid_step / nd.span(), nd.weight);
    lin += belief.mean[i] * dv;
    var += belief.variance[i] * (form == VarianceForm::paper ? dv : 2.0 * nd.weight * dv);
  }
  return lin + risk.kappa() * std::sqrt(var);
}

}  // namespace rapa

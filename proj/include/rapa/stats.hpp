#ifndef RAPA_STATS_HPP
#define RAPA_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace rapa::stats {

[[nodiscard]] double mean(std::span<const double> xs);
[[nodiscard]] double median(std::vector<double> xs);

struct SignTest {
  std::size_t wins = 0;    // pairs with a < b
  std::size_t losses = 0;  // pairs with a > b
  std::size_t ties = 0;
  double p_value = 1.0;    // P(X >= wins), X ~ Binomial(wins + losses, 1/2)
};

/// One-sided paired sign test of H1: a tends to be smaller than b.
/// Pairs with |a - b| <= tie_tol are dropped.
[[nodiscard]] SignTest sign_test_less(std::span<const double> a, std::span<const double> b,
                                      double tie_tol = 0.0);

/// Upper tail P(X >= k) for X ~ Binomial(n, 1/2).
[[nodiscard]] double binomial_upper_tail(std::size_t n, std::size_t k);

/// Spearman rank correlation with average ranks for ties.
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);

/// Indices of points not dominated under minimization of both coordinates.
[[nodiscard]] std::vector<bool> nondominated(std::span<const double> f1, std::span<const double> f2);

}  // namespace rapa::stats

#endif  // RAPA_STATS_HPP

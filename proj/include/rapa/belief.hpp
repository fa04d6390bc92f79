#ifndef RAPA_BELIEF_HPP
#define RAPA_BELIEF_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rapa {

/// Running per-node estimates of the attack indicator's mean and variance.
///
/// The prior (mean 1/n, variance 0) counts as the first observation, so after
/// k updates `t == k + 1` and each update blends the new observation with
/// weight 1/(t+1):
///
///   mean'     = t/(t+1) * mean     + y/(t+1)
///   variance' = t/(t+1) * variance + (y - mean')^2/(t+1)
///
/// The variance rule is a streaming approximation and is biased relative to
/// the sample variance; it is kept as written.
struct BeliefState {
  std::vector<double> mean;
  std::vector<double> variance;
  std::uint64_t t = 1;

  [[nodiscard]] std::size_t size() const noexcept { return mean.size(); }
};

[[nodiscard]] BeliefState init_belief(std::size_t n);

/// Throws ValidationError on length mismatch or non-binary entries.
[[nodiscard]] BeliefState update_belief(const BeliefState& b, std::span<const std::uint8_t> observed);

/// Belief of an estimator that already knows p: mean p, variance p(1-p).
[[nodiscard]] BeliefState known_belief(std::span<const double> p);

struct BeliefError {
  std::vector<double> mean_err;  // mean_i - p_i
  std::vector<double> var_err;   // variance_i - p_i(1 - p_i)

  [[nodiscard]] double max_abs_mean() const noexcept;
  [[nodiscard]] double max_abs_var() const noexcept;
};

[[nodiscard]] BeliefError belief_error(const BeliefState& b, std::span<const double> true_p);

}  // namespace rapa

#endif  // RAPA_BELIEF_HPP

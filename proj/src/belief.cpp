#include "rapa/belief.hpp"

#include <algorithm>
#include <cmath>

#include "rapa/model.hpp"

namespace rapa {

BeliefState init_belief(std::size_t n) {
  if (n == 0) throw ValidationError("belief: n must be at least 1");
  BeliefState b;
  b.mean.assign(n, 1.0 / static_cast<double>(n));
  b.variance.assign(n, 0.0);
  b.t = 1;
  return b;
}

BeliefState update_belief(const BeliefState& b, std::span<const std::uint8_t> observed) {
  if (observed.size() != b.size()) throw ValidationError("belief: observation length mismatch");
  const double t = static_cast<double>(b.t);
  const double keep = t / (t + 1.0);
  BeliefState next;
  next.mean.resize(b.size());
  next.variance.resize(b.size());
  next.t = b.t + 1;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (observed[i] > 1) throw ValidationError("belief: observations must be 0 or 1");
    const double y = observed[i];
    const double m = keep * b.mean[i] + y / (t + 1.0);
    const double d = y - m;
    next.mean[i] = m;
    next.variance[i] = keep * b.variance[i] + d * d / (t + 1.0);
  }
  return next;
}

BeliefState known_belief(std::span<const double> p) {
  BeliefState b;
  b.mean.reserve(p.size());
  b.variance.reserve(p.size());
  for (double pi : p) {
    if (!(pi >= 0.0 && pi <= 1.0)) throw ValidationError("belief: probability outside [0,1]");
    b.mean.push_back(pi);
    b.variance.push_back(pi * (1.0 - pi));
  }
  return b;
}

double BeliefError::max_abs_mean() const noexcept {
  double m = 0.0;
  for (double e : mean_err) m = std::max(m, std::abs(e));
  return m;
}

double BeliefError::max_abs_var() const noexcept {
  double m = 0.0;
  for (double e : var_err) m = std::max(m, std::abs(e));
  return m;
}

BeliefError belief_error(const BeliefState& b, std::span<const double> true_p) {
  if (true_p.size() != b.size()) throw ValidationError("belief: true_p length mismatch");
  BeliefError e;
  e.mean_err.resize(b.size());
  e.var_err.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    e.mean_err[i] = b.mean[i] - true_p[i];
    e.var_err[i] = b.variance[i] - true_p[i] * (1.0 - true_p[i]);
  }
  return e;
}

}  // namespace rapa

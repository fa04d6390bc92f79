#include "rapa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rapa::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

double binomial_upper_tail(std::size_t n, std::size_t k) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  // log C(n, j) - n log 2, summed in linear space.
  double tail = 0.0;
  for (std::size_t j = k; j <= n; ++j) {
    const double lc = std::lgamma(static_cast<double>(n) + 1.0) -
                      std::lgamma(static_cast<double>(j) + 1.0) -
                      std::lgamma(static_cast<double>(n - j) + 1.0);
    tail += std::exp(lc - static_cast<double>(n) * std::log(2.0));
  }
  return std::min(tail, 1.0);
}

SignTest sign_test_less(std::span<const double> a, std::span<const double> b, double tie_tol) {
  if (a.size() != b.size()) throw std::invalid_argument("sign test: length mismatch");
  SignTest r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    if (std::abs(d) <= tie_tol) {
      ++r.ties;
    } else if (d > 0.0) {
      ++r.wins;
    } else {
      ++r.losses;
    }
  }
  r.p_value = binomial_upper_tail(r.wins + r.losses, r.wins);
  return r;
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need >= 2 paired values");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<bool> nondominated(std::span<const double> f1, std::span<const double> f2) {
  const std::size_t n = f1.size();
  std::vector<bool> keep(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && keep[i]; ++j) {
      if (j == i) continue;
      const bool weakly = f1[j] <= f1[i] && f2[j] <= f2[i];
      const bool strictly = f1[j] < f1[i] || f2[j] < f2[i];
      if (weakly && strictly) keep[i] = false;
    }
  }
  return keep;
}

}  // namespace rapa::stats

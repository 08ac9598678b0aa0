// Independent reference computations for the test suites. Nothing here calls
// into the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// All size-k subsets (as bitmasks) maximizing the sum of selected entries.
inline std::vector<std::vector<std::size_t>> top_k_sets(
    const std::vector<double>& u, std::size_t k, double tol = 1e-12) {
  const std::size_t n = u.size();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    masks.push_back(mask);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s += u[i];
    }
    best = std::max(best, s);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask : masks) {
    double s = 0.0;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        s += u[i];
        members.push_back(i);
      }
    }
    if (s >= best - tol * static_cast<double>(k)) out.push_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double sum_of_largest(std::vector<double> u, std::size_t m) {
  std::sort(u.begin(), u.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += u[i];
  return s;
}

// Visits every point of the simplex grid {c / steps : sum c = steps}.
inline void for_each_grid_point(std::size_t n, std::size_t steps,
                                const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<std::size_t> counts(n, 0);
  std::vector<double> p(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i,
                                                          std::size_t left) {
    if (i + 1 == n) {
      counts[i] = left;
      for (std::size_t j = 0; j < n; ++j) {
        p[j] = static_cast<double>(counts[j]) / static_cast<double>(steps);
      }
      fn(p);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, steps);
}

// sup_p <p, u> + 1 - sigma_k(p) over the grid, minus u_y: the conjugate form
// of the consistent surrogate, discretized.
inline double lk_conjugate_on_grid(const std::vector<double>& u, std::size_t y,
                                   std::size_t k, std::size_t steps) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_grid_point(u.size(), steps, [&](const std::vector<double>& p) {
    double inner = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) inner += p[i] * u[i];
    best = std::max(best, inner + 1.0 - sum_of_largest(p, k));
  });
  return best - u[y];
}

// Central finite-difference gradient.
inline std::vector<double> numeric_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Expected discrete L4 loss (1 - p(T)) (k+1)/(k+1-|T|), minimized over every
// subset with |T| <= k by bitmask enumeration.
inline double min_expected_ell4(const std::vector<double>& p, std::size_t k) {
  const std::size_t n = p.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size > k) continue;
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) mass += p[i];
    }
    const double value = (1.0 - mass) * static_cast<double>(k + 1) /
                         static_cast<double>(k + 1 - size);
    best = std::min(best, value);
  }
  return best;
}

// Expected discrete L2 loss of (H, M), minimized over every valid pair by
// enumerating the three-way label assignment.
inline double min_expected_ell2(const std::vector<double>& p, std::size_t k) {
  const std::size_t n = p.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    std::size_t h = 0, m = 0;
    double ph = 0.0, pm = 0.0;
    for (std::size_t i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 1) { ++h; ph += p[i]; }
      if (c % 3 == 2) { ++m; pm += p[i]; }
    }
    if (h >= k || h + m > k) continue;
    const double medium = (static_cast<double>(h + m) - 1.0) /
                          static_cast<double>(k - h);
    const double rest = 1.0 - ph - pm;
    const double value = pm * medium +
                         rest * (medium + static_cast<double>(k + 1) /
                                              static_cast<double>(k));
    best = std::min(best, value);
  }
  return best;
}

// Expected top-k loss of a set under p.
inline double expected_topk(const std::vector<double>& p,
                            const std::vector<std::size_t>& set) {
  double covered = 0.0;
  for (std::size_t i : set) covered += p[i];
  return 1.0 - covered;
}

// Flat Dirichlet(1,...,1) draws by sorting uniform spacings.
inline std::vector<double> uniform_simplex(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> cuts(n - 1);
  for (double& c : cuts) c = unif(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> p(n);
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    p[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  p[n - 1] = 1.0 - prev;
  return p;
}

}  // namespace oracle

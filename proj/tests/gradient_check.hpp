// Filters random score vectors down to points where every surrogate is
// differentiable with some room to spare.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "topk/losses.hpp"

namespace gradient_check {

using topk::LossId;
using Vec = std::vector<double>;

inline bool gaps_exceed(const Vec& u, double gap) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      if (std::abs(u[i] - u[j]) <= gap) return false;
    }
  }
  return true;
}

// True when every kink of the surrogate is at least `margin` away at u: top-k
// selections are strict and positive-part and max-over-m arguments are
// separated from their switching points.
inline bool away_from_kinks(LossId id, const Vec& u, std::size_t k, double margin) {
  if (!gaps_exceed(u, margin)) return false;
  const std::size_t n = u.size();
  for (std::size_t y = 0; y < n; ++y) {
    Vec shifted = u;
    shifted[y] -= 1.0;
    switch (id) {
      case LossId::kL2: {
        if (!gaps_exceed(shifted, margin)) return false;
        const double arg = 1.0 - u[y] + oracle::sum_of_largest(shifted, k) / k;
        if (std::abs(arg) <= margin) return false;
        break;
      }
      case LossId::kL3: {
        if (!gaps_exceed(shifted, margin)) return false;
        Vec sorted = shifted;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        for (std::size_t i = 0; i < k; ++i) {
          if (std::abs(1.0 - u[y] + sorted[i]) <= margin) return false;
        }
        break;
      }
      case LossId::kL4: {
        Vec rest;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != y) rest.push_back(u[i]);
        }
        const double arg = 1.0 - u[y] + oracle::sum_of_largest(rest, k) / k;
        if (std::abs(arg) <= margin) return false;
        break;
      }
      case LossId::kLk:
      case LossId::kTopK:
        break;
    }
  }
  if (id == LossId::kLk) {
    std::vector<double> values;
    for (std::size_t m = 1; m <= n; ++m) {
      values.push_back(oracle::sum_of_largest(u, m) / m +
                       std::max(0.0, 1.0 - double(k) / m));
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    if (values[0] - values[1] <= margin) return false;
  }
  return true;
}

}  // namespace gradient_check

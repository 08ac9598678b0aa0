#include "topk/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace topk {

LabelSpace::LabelSpace(std::size_t n, std::size_t k) : n_(n), k_(k) {
  if (n < 2) {
    throw std::invalid_argument("label space needs n >= 2, got n = " +
                                std::to_string(n));
  }
  if (k < 1 || k >= n) {
    throw std::invalid_argument("label space needs 1 <= k < n, got k = " +
                                std::to_string(k) +
                                ", n = " + std::to_string(n));
  }
}

ProbVector::ProbVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) {
    throw std::invalid_argument("probability vector is empty");
  }
  double total = 0.0;
  for (double x : p_) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::invalid_argument(
          "probability vector has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument("probability vector sums to " +
                                std::to_string(total) + ", not 1");
  }
}

ProbVector ProbVector::normalized(std::vector<double> p, double tolerance,
                                  bool* renormalized) {
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::invalid_argument(
          "probability vector has a negative or non-finite entry");
    }
    total += x;
  }
  if (p.empty() || std::abs(total - 1.0) > tolerance) {
    throw std::invalid_argument("probability vector sums to " +
                                std::to_string(total) + ", not 1");
  }
  const bool rescale = std::abs(total - 1.0) > kSimplexTolerance;
  if (rescale) {
    for (double& x : p) {
      x /= total;
    }
  }
  if (renormalized != nullptr) {
    *renormalized = rescale;
  }
  return ProbVector(std::move(p));
}

ScoreVector::ScoreVector(std::vector<double> u) : u_(std::move(u)) {
  for (double x : u_) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("score vector has a non-finite entry");
    }
  }
}

TopKSet::TopKSet(LabelSet members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("label set has duplicate members");
  }
}

bool TopKSet::contains(Label y) const {
  return std::binary_search(members_.begin(), members_.end(), y);
}

SortedScores sorted_desc(std::span<const double> u) {
  SortedScores out;
  out.order.resize(u.size());
  std::iota(out.order.begin(), out.order.end(), Label{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](Label a, Label b) { return u[a] > u[b]; });
  out.values.reserve(u.size());
  for (Label i : out.order) {
    out.values.push_back(u[i]);
  }
  return out;
}

double sigma(std::span<const double> u, std::size_t m) {
  if (m < 1 || m > u.size()) {
    throw std::out_of_range("sigma: m = " + std::to_string(m) +
                            " outside [1, " + std::to_string(u.size()) + "]");
  }
  std::vector<double> v(u.begin(), u.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m - 1),
                   v.end(), std::greater<>());
  std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m),
            std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    s += v[i];
  }
  return s;
}

namespace {

void check_k(std::span<const double> u, std::size_t k) {
  if (k < 1 || k > u.size()) {
    throw std::out_of_range("top-k: k = " + std::to_string(k) +
                            " outside [1, " + std::to_string(u.size()) + "]");
  }
}

// Labels strictly above the k-th value, and labels tied with it.
struct TopKSplit {
  LabelSet above;
  LabelSet tied;
};

TopKSplit split_at_kth(std::span<const double> u, std::size_t k) {
  const double kth = sorted_desc(u).values[k - 1];
  TopKSplit split;
  for (Label i = 0; i < u.size(); ++i) {
    if (u[i] > kth + kTieTolerance) {
      split.above.push_back(i);
    } else if (std::abs(u[i] - kth) <= kTieTolerance) {
      split.tied.push_back(i);
    }
  }
  return split;
}

}  // namespace

std::vector<TopKSet> top_k_sets(std::span<const double> u, std::size_t k) {
  check_k(u, k);
  const TopKSplit split = split_at_kth(u, k);
  const std::size_t fill = k - split.above.size();
  std::vector<TopKSet> out;
  for (const LabelSet& pick : combinations(split.tied.size(), fill)) {
    LabelSet members = split.above;
    for (std::size_t j : pick) {
      members.push_back(split.tied[j]);
    }
    out.emplace_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TopKSet argmax_link(std::span<const double> u, std::size_t k) {
  check_k(u, k);
  TopKSplit split = split_at_kth(u, k);
  const std::size_t fill = k - split.above.size();
  split.above.insert(split.above.end(), split.tied.begin(),
                     split.tied.begin() + static_cast<std::ptrdiff_t>(fill));
  return TopKSet(std::move(split.above));
}

std::vector<LabelSet> combinations(std::size_t n, std::size_t r) {
  std::vector<LabelSet> out;
  if (r > n) {
    return out;
  }
  LabelSet current(r);
  std::iota(current.begin(), current.end(), Label{0});
  for (;;) {
    out.push_back(current);
    // Advance the rightmost slot that still has room.
    std::size_t i = r;
    while (i > 0 && current[i - 1] == n - r + (i - 1)) {
      --i;
    }
    if (i == 0) {
      return out;
    }
    ++current[i - 1];
    for (std::size_t j = i; j < r; ++j) {
      current[j] = current[j - 1] + 1;
    }
  }
}

std::vector<double> indicator(std::span<const Label> members, std::size_t n) {
  std::vector<double> v(n, 0.0);
  for (Label i : members) {
    v.at(i) = 1.0;
  }
  return v;
}

DirichletSampler::DirichletSampler(std::vector<double> alpha,
                                   std::uint64_t seed)
    : alpha_(std::move(alpha)), rng_(seed) {
  if (alpha_.empty()) {
    throw std::domain_error("Dirichlet concentration vector is empty");
  }
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::domain_error("Dirichlet concentrations must be positive");
    }
  }
}

ProbVector DirichletSampler::sample() {
  std::vector<double> x(alpha_.size());
  for (;;) {
    double total = 0.0;
    for (std::size_t i = 0; i < alpha_.size(); ++i) {
      x[i] = rng_.gamma(alpha_[i]);
      total += x[i];
    }
    // Tiny shapes can underflow every variate; redraw in that case.
    if (total > 0.0 && std::isfinite(total)) {
      for (double& xi : x) {
        xi /= total;
      }
      return ProbVector::normalized(std::move(x), 1e-9);
    }
  }
}

std::vector<ProbVector> DirichletSampler::sample(std::size_t count) {
  std::vector<ProbVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(sample());
  }
  return out;
}

std::vector<ProbVector> dirichlet_sample(std::span<const double> alpha,
                                         std::uint64_t seed,
                                         std::size_t count) {
  if (count < 1) {
    throw std::invalid_argument("dirichlet_sample: count must be >= 1");
  }
  DirichletSampler sampler(std::vector<double>(alpha.begin(), alpha.end()),
                           seed);
  return sampler.sample(count);
}

}  // namespace topk

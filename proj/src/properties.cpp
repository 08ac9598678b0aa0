#include "topk/properties.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "topk/losses.hpp"
#include "topk/random.hpp"

namespace topk {

std::vector<TopKSet> prop_topk(const ProbVector& p, std::size_t k) {
  return top_k_sets(p.values(), k);
}

PropertyValue prop_over_reps(const RepresentativeSet& reps, const ProbVector& p,
                             double tol) {
  if (p.size() != reps.space.n()) {
    throw std::invalid_argument("probability vector does not match the label space");
  }
  if (reps.entries.empty()) {
    throw std::invalid_argument("representative set is empty");
  }
  std::vector<double> values(reps.entries.size());
  for (std::size_t e = 0; e < values.size(); ++e) {
    values[e] = reps.expected_loss(e, p);
  }
  PropertyValue out;
  out.min_value = *std::min_element(values.begin(), values.end());
  for (std::size_t e = 0; e < values.size(); ++e) {
    if (values[e] <= out.min_value + tol) {
      out.entries.push_back(e);
    }
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [&](std::size_t a, std::size_t b) {
                     return reps.entries[a].embedded < reps.entries[b].embedded;
                   });
  return out;
}

GreedyTrace greedy_prop_l4(const ProbVector& p, std::size_t k) {
  const SortedScores sorted = sorted_desc(p.values());
  GreedyTrace trace;
  double captured = 0.0;
  for (std::size_t i = 0; i < sorted.order.size() && trace.result.members.size() < k;
       ++i) {
    const double size = static_cast<double>(trace.result.members.size());
    const double threshold =
        (1.0 - captured) / (static_cast<double>(k) + 1.0 - size);
    const bool accepted = sorted.values[i] >= threshold;
    trace.steps.push_back({sorted.order[i], threshold, accepted});
    if (!accepted) {
      break;
    }
    trace.result.members.push_back(sorted.order[i]);
    captured += sorted.values[i];
  }
  std::sort(trace.result.members.begin(), trace.result.members.end());
  return trace;
}

std::size_t h_star(const ProbVector& p, std::size_t k) {
  const SortedScores sorted = sorted_desc(p.values());
  std::size_t best = 0;
  double prefix = 0.0;  // sigma_{i-1}(p)
  for (std::size_t i = 1; i <= k - 1 && i <= sorted.values.size(); ++i) {
    const double threshold =
        (1.0 - prefix) / static_cast<double>(k - (i - 1));
    if (sorted.values[i - 1] > threshold) {
      best = i;
    }
    prefix += sorted.values[i - 1];
  }
  return best;
}

std::size_t m_star(const ProbVector& p, std::size_t k) {
  const std::size_t h = h_star(p, k);
  if (h >= k) {
    throw std::domain_error("m_star: h* = k leaves a zero denominator");
  }
  const SortedScores sorted = sorted_desc(p.values());
  double high_mass = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    high_mass += sorted.values[i];
  }
  const double threshold = (1.0 - high_mass) / static_cast<double>((k + 1) * (k - h));
  std::size_t best = 0;
  for (std::size_t j = 1; j <= k && j <= sorted.values.size(); ++j) {
    if (sorted.values[j - 1] > threshold) {
      best = j;
    }
  }
  return best;
}

bool gamma_k_membership(std::span<const double> u, const ProbVector& p,
                        std::size_t k) {
  const double value = expected_surrogate_loss(LossId::kLk, u, p, k);
  return std::abs(value - bayes_risk_topk(p, k)) <= kMembershipTolerance;
}

std::vector<double> gamma_k_construct(const ProbVector& p, std::size_t k,
                                      std::span<const double> hull_weights,
                                      std::span<const double> cone_coeffs,
                                      double alpha) {
  const std::size_t n = p.size();
  const std::vector<TopKSet> optimal = prop_topk(p, k);
  if (hull_weights.size() != optimal.size()) {
    throw std::invalid_argument("expected " + std::to_string(optimal.size()) +
                                " hull weights, got " +
                                std::to_string(hull_weights.size()));
  }
  double total = 0.0;
  for (double w : hull_weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("hull weights must be nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("hull weights must sum to 1");
  }
  if (!cone_coeffs.empty() && cone_coeffs.size() != n) {
    throw std::invalid_argument("cone coefficients need one entry per label");
  }
  std::vector<double> u(n, alpha);
  for (std::size_t s = 0; s < optimal.size(); ++s) {
    for (Label i : optimal[s].members()) {
      u[i] += hull_weights[s];
    }
  }
  for (Label i = 0; i < cone_coeffs.size(); ++i) {
    if (cone_coeffs[i] == 0.0) {
      continue;
    }
    if (cone_coeffs[i] < 0.0) {
      throw std::domain_error("cone coefficients must be nonnegative");
    }
    if (p[i] > 0.0) {
      throw std::domain_error("cone coefficient on label " +
                              std::to_string(i + 1) +
                              ", which has positive probability");
    }
    u[i] -= cone_coeffs[i];
  }
  return u;
}

double separation_radius(std::size_t n) {
  return 1.0 / (2.0 * static_cast<double>(n)) - 1e-6;
}

SeparationReport epsilon_separation_probe(const ProbVector& p, std::size_t k,
                                          std::size_t trials,
                                          std::uint64_t seed, double radius) {
  const std::size_t n = p.size();
  const std::vector<TopKSet> optimal = prop_topk(p, k);
  SeparationReport report;
  report.trials = trials;
  report.radius = radius;
  Rng rng(seed);
  std::vector<double> weights(optimal.size());
  std::vector<double> cone(n, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    // Dirichlet(1, ..., 1) hull weights.
    double total = 0.0;
    for (double& w : weights) {
      w = rng.gamma(1.0);
      total += w;
    }
    for (double& w : weights) {
      w /= total;
    }
    // Renormalize so the weights pass the convex-combination check exactly.
    total = 0.0;
    for (std::size_t s = 0; s + 1 < weights.size(); ++s) {
      total += weights[s];
    }
    weights.back() = 1.0 - total;
    if (weights.back() < 0.0) {
      weights.back() = 0.0;
    }
    for (Label i = 0; i < n; ++i) {
      cone[i] = p[i] == 0.0 ? rng.uniform(0.0, 2.0) : 0.0;
    }
    const double alpha = rng.uniform(-1.0, 1.0);
    const std::vector<double> u = gamma_k_construct(p, k, weights, cone, alpha);

    std::vector<double> perturbed = u;
    for (double& x : perturbed) {
      x += rng.uniform(-radius, radius);
    }
    TopKSet linked = argmax_link(perturbed, k);
    if (!std::binary_search(optimal.begin(), optimal.end(), linked)) {
      ++report.violations;
      if (report.examples.size() < kMaxReportedViolations) {
        report.examples.push_back({u, std::move(perturbed), std::move(linked)});
      }
    }
  }
  return report;
}

SeparationReport epsilon_separation_probe(const ProbVector& p, std::size_t k,
                                          std::size_t trials,
                                          std::uint64_t seed) {
  return epsilon_separation_probe(p, k, trials, seed,
                                  separation_radius(p.size()));
}

}  // namespace topk

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topk/embeddings.hpp"
#include "topk/simplex.hpp"

namespace topk {

// Minimizers of expected loss over a finite report set.
struct PropertyValue {
  // Indices into the representative set, ordered so that the embedded vectors
  // ascend lexicographically.
  std::vector<std::size_t> entries;
  double min_value = 0.0;
};

struct GreedyStep {
  Label candidate;
  double threshold;
  bool accepted;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  SubsetReport result;
};

// Top-k optimal sets for p: top_k_sets(p).
std::vector<TopKSet> prop_topk(const ProbVector& p, std::size_t k);

// Every entry whose expected surrogate loss is within `tol` of the minimum.
PropertyValue prop_over_reps(const RepresentativeSet& reps, const ProbVector& p,
                             double tol = kArgminTolerance);

// Adds labels in descending probability while p_z >= (1 - sigma_T(p)) /
// (k + 1 - |T|) and |T| < k, stopping at the first rejection.
GreedyTrace greedy_prop_l4(const ProbVector& p, std::size_t k);

// Largest i in {0, ..., k-1} with p_[i] > (1 - sigma_{i-1}(p)) / (k - i + 1);
// i = 0 always qualifies.
std::size_t h_star(const ProbVector& p, std::size_t k);

// Largest j in {0, ..., k} with p_[j] > (1 - sigma_{h*}(p)) / ((k+1)(k-h*)).
std::size_t m_star(const ProbVector& p, std::size_t k);

inline constexpr double kMembershipTolerance = 1e-9;

// u is L_k-optimal for p iff its expected L_k loss equals 1 - sigma_k(p).
bool gamma_k_membership(std::span<const double> u, const ProbVector& p,
                        std::size_t k);

// u = sum_S w_S 1_S - sum_i c_i 1_i + alpha 1 with S over top_k_sets(p) (in
// that order) and c supported on zero-probability labels. Throws
// std::domain_error for a cone coefficient on a positive-probability label and
// std::invalid_argument for weights that are not a convex combination.
std::vector<double> gamma_k_construct(const ProbVector& p, std::size_t k,
                                      std::span<const double> hull_weights,
                                      std::span<const double> cone_coeffs,
                                      double alpha);

struct SeparationViolation {
  std::vector<double> optimum;
  std::vector<double> perturbed;
  TopKSet linked;
};

struct SeparationReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double radius = 0.0;
  // At most kMaxReportedViolations are kept.
  std::vector<SeparationViolation> examples;
};

inline constexpr std::size_t kMaxReportedViolations = 10;

// Default perturbation radius 1/(2n) - 1e-6.
double separation_radius(std::size_t n);

// Samples members of Gamma_k(p) and checks that every perturbation of sup-norm
// at most `radius` still links into prop_topk(p).
SeparationReport epsilon_separation_probe(const ProbVector& p, std::size_t k,
                                          std::size_t trials,
                                          std::uint64_t seed, double radius);
SeparationReport epsilon_separation_probe(const ProbVector& p, std::size_t k,
                                          std::size_t trials,
                                          std::uint64_t seed);

}  // namespace topk

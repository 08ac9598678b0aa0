#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topk/random.hpp"

namespace topk {

// Labels are 0-based in the library; every external format is 1-based.
using Label = std::size_t;
using LabelSet = std::vector<Label>;

// Scores closer than this are treated as tied when forming top-k sets.
inline constexpr double kTieTolerance = 1e-12;
// Probability vectors must sum to one within this tolerance.
inline constexpr double kSimplexTolerance = 1e-12;

class LabelSpace {
 public:
  // Throws std::invalid_argument unless n >= 2 and 1 <= k < n.
  LabelSpace(std::size_t n, std::size_t k);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  std::size_t n_;
  std::size_t k_;
};

// A point of the probability simplex.
class ProbVector {
 public:
  // Throws std::invalid_argument on negative or non-finite entries, or when the
  // entries do not sum to one within kSimplexTolerance.
  explicit ProbVector(std::vector<double> p);

  // Accepts vectors within `tolerance` of the simplex and rescales them. Sets
  // *renormalized (when given) if any rescaling was needed.
  static ProbVector normalized(std::vector<double> p, double tolerance,
                               bool* renormalized = nullptr);

  std::span<const double> values() const noexcept { return p_; }
  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }

 private:
  std::vector<double> p_;
};

// A surrogate report: finite real scores, one per label.
class ScoreVector {
 public:
  // Throws std::invalid_argument on NaN or infinite entries.
  explicit ScoreVector(std::vector<double> u);

  std::span<const double> values() const noexcept { return u_; }
  std::size_t size() const noexcept { return u_.size(); }
  double operator[](std::size_t i) const { return u_[i]; }

 private:
  std::vector<double> u_;
};

// A set of distinct labels, stored ascending. Used as the top-k report.
class TopKSet {
 public:
  // Sorts the members; throws std::invalid_argument on duplicates.
  explicit TopKSet(LabelSet members);

  const LabelSet& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(Label y) const;

  friend auto operator<=>(const TopKSet&, const TopKSet&) = default;

 private:
  LabelSet members_;
};

struct SortedScores {
  LabelSet order;              // labels by value descending, ties by index
  std::vector<double> values;  // values[i] = u[order[i]]
};

SortedScores sorted_desc(std::span<const double> u);

// Sum of the m largest entries of u. Throws std::out_of_range unless
// 1 <= m <= u.size().
double sigma(std::span<const double> u, std::size_t m);

// Every size-k label set maximizing <1_S, u>, in lexicographic order.
std::vector<TopKSet> top_k_sets(std::span<const double> u, std::size_t k);

// The lexicographically smallest member of top_k_sets(u, k).
TopKSet argmax_link(std::span<const double> u, std::size_t k);

// All size-r subsets of {0, ..., n-1} in lexicographic order.
std::vector<LabelSet> combinations(std::size_t n, std::size_t r);

// Indicator vector of `members` in R^n.
std::vector<double> indicator(std::span<const Label> members, std::size_t n);

class DirichletSampler {
 public:
  // Throws std::domain_error if any concentration is not positive.
  DirichletSampler(std::vector<double> alpha, std::uint64_t seed);

  ProbVector sample();
  std::vector<ProbVector> sample(std::size_t count);

 private:
  std::vector<double> alpha_;
  Rng rng_;
};

std::vector<ProbVector> dirichlet_sample(std::span<const double> alpha,
                                         std::uint64_t seed, std::size_t count);

}  // namespace topk

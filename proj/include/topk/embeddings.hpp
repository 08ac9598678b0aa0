#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "topk/losses.hpp"
#include "topk/simplex.hpp"

namespace topk {

// "High" and "medium" label bins. Invariants: disjoint, |H| + |M| <= k,
// |H| < k.
struct HMReport {
  LabelSet high;
  LabelSet medium;

  friend bool operator==(const HMReport&, const HMReport&) = default;
};

// blocks[j] holds the labels scored j. Block 0 may be empty; every other block
// is nonempty, blocks partition the labels, and at most k labels are positive.
struct OrderedPartition {
  std::vector<LabelSet> blocks;

  friend bool operator==(const OrderedPartition&,
                         const OrderedPartition&) = default;
};

// Any label set with at most k members.
struct SubsetReport {
  LabelSet members;

  friend bool operator==(const SubsetReport&, const SubsetReport&) = default;
};

using DiscreteReport =
    std::variant<HMReport, OrderedPartition, SubsetReport, TopKSet>;

// Discrete losses embedded by the surrogates.

// Throws std::invalid_argument if |H| >= k.
double ell2_hat(const HMReport& r, Label y, std::size_t k);
// Defined as loss_l3 at the partition's embedded point.
double ell3_hat(const OrderedPartition& q, Label y, std::size_t k);
// Block-count closed form. Agrees with ell3_hat when exactly k labels are
// positive; can differ when fewer are.
double ell3_hat_closed_form(const OrderedPartition& q, Label y, std::size_t k);
double ell4_hat(const SubsetReport& t, Label y, std::size_t k);
// Dispatches on the report kind; TopKSet gives the top-k loss.
double discrete_loss(const DiscreteReport& r, Label y, std::size_t k);

// Embedding maps.
std::vector<double> embed_hm(const HMReport& r, const LabelSpace& space);
std::vector<double> embed_partition(const OrderedPartition& q, std::size_t n);
// Inverse of embed_partition for nonnegative integer-valued scores.
OrderedPartition partition_from_scores(std::span<const double> u);
std::vector<double> embed_subset(const SubsetReport& t,
                                 const LabelSpace& space);

bool is_valid(const HMReport& r, const LabelSpace& space);
bool is_valid(const OrderedPartition& q, const LabelSpace& space);
// Number of labels with a positive level.
std::size_t positive_count(const OrderedPartition& q);

struct RepresentativeEntry {
  // Discrete reports embedding to this point; more than one only when the
  // reparameterization is not injective (R2 singletons).
  std::vector<DiscreteReport> reports;
  std::vector<double> embedded;
  // rows[y] = surrogate loss at `embedded` for label y.
  std::vector<double> rows;
};

struct RepresentativeSet {
  LossId loss;
  LabelSpace space;
  std::vector<RepresentativeEntry> entries;

  // <p, rows> of one entry.
  double expected_loss(std::size_t entry, const ProbVector& p) const;
};

// Representative sets are enumerated for n up to this bound.
inline constexpr std::size_t kMaxEnumerationLabels = 12;

RepresentativeSet enumerate_r2(const LabelSpace& space);
RepresentativeSet enumerate_r3(const LabelSpace& space);
RepresentativeSet enumerate_r4(const LabelSpace& space);
RepresentativeSet enumerate_rk(const LabelSpace& space);
// The representative set for a surrogate; throws for kTopK.
RepresentativeSet representative_set(LossId id, const LabelSpace& space);

inline constexpr double kRowTolerance = 1e-12;
inline constexpr double kArgminTolerance = 1e-9;

struct RowViolation {
  std::size_t entry;
  Label label;
  double surrogate;
  double discrete;
};

struct EmbeddingReport {
  // Condition (i): max |L(phi(r), y) - ell(r, y)| over entries, aliases and y.
  double max_row_deviation = 0.0;
  std::vector<RowViolation> row_violations;
  // Closed-form ell3 check over partitions with exactly k positive labels.
  std::size_t closed_form_checked = 0;
  double closed_form_max_deviation = 0.0;
  // Condition (ii): indices of samples whose discrete and surrogate argmin
  // sets differ.
  std::vector<std::size_t> argmin_violations;

  bool passed() const {
    return row_violations.empty() && argmin_violations.empty() &&
           closed_form_max_deviation <= kRowTolerance;
  }
};

EmbeddingReport verify_embedding(const RepresentativeSet& reps,
                                 std::span<const ProbVector> samples);

}  // namespace topk

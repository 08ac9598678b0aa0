#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topk/embeddings.hpp"
#include "topk/losses.hpp"
#include "topk/simplex.hpp"

namespace topk {

// Closed-form regions on which each prior surrogate is consistent, evaluated
// exactly as stated, strict inequalities included.

// p_[k] > (1 - sigma_{h*}(p)) / ((k+1)(k-h*)).
bool in_p2(const ProbVector& p, std::size_t k);
// p_[k+1] > 1/(k+1) and (sum_{i>k} p_[i]) / (k-1) >= p_[k]. Throws
// std::domain_error for k = 1.
bool in_p3(const ProbVector& p, std::size_t k);
// p_[k] > 1 - sigma_k(p).
bool in_p4(const ProbVector& p, std::size_t k);

struct AuditVerdict {
  // argmax_link of every surrogate optimum is top-k optimal.
  bool link_consistent = true;
  // Every top-k set of every surrogate optimum is top-k optimal.
  bool link_agnostic_consistent = true;
  // Optima (embedded) violating either condition.
  std::vector<std::vector<double>> witnesses;
};

AuditVerdict audit(const RepresentativeSet& reps, const ProbVector& p);
AuditVerdict audit(LossId id, const LabelSpace& space, const ProbVector& p);

enum class Predicate { kP2, kP3, kP4, kNone };

std::string to_string(Predicate predicate);
// Throws std::invalid_argument on an unknown name.
Predicate parse_predicate(std::string_view name);
bool evaluate_predicate(Predicate predicate, const ProbVector& p, std::size_t k);

// Samples whose k-th and (k+1)-th largest probabilities are this close are
// flagged as near ties.
inline constexpr double kNearTieGap = 1e-7;
bool near_tie(const ProbVector& p, std::size_t k);

struct RegionScanConfig {
  LossId loss = LossId::kL4;
  Predicate predicate = Predicate::kNone;
  LabelSpace space{5, 2};
  // Dirichlet concentrations; empty means all ones.
  std::vector<double> alpha;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

struct RegionRecord {
  std::size_t sample_id;
  std::vector<double> p;
  bool predicate;
  bool link_consistent;
  bool link_agnostic;
  bool near_tie;
};

struct RegionSummary {
  std::size_t samples = 0;
  std::size_t predicate_true = 0;
  std::size_t predicate_and_consistent = 0;
  std::size_t link_consistent = 0;
  std::size_t link_agnostic = 0;
  std::size_t near_ties = 0;
  // P(link_consistent | predicate); empty when no sample satisfies the
  // predicate. Predicate kNone counts every sample as satisfying it.
  std::optional<double> implication_rate;
};

struct RegionScan {
  std::vector<RegionRecord> records;
  RegionSummary summary;
};

RegionScan region_scan(const RegionScanConfig& cfg);

}  // namespace topk

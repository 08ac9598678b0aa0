#include "topk/consistency.hpp"

#include <algorithm>
#include <stdexcept>

#include "topk/properties.hpp"

namespace topk {

bool in_p2(const ProbVector& p, std::size_t k) {
  const std::size_t h = h_star(p, k);
  const SortedScores sorted = sorted_desc(p.values());
  double high_mass = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    high_mass += sorted.values[i];
  }
  return sorted.values[k - 1] >
         (1.0 - high_mass) / static_cast<double>((k + 1) * (k - h));
}

bool in_p3(const ProbVector& p, std::size_t k) {
  if (k < 2) {
    throw std::domain_error("in_p3 needs k >= 2 (k - 1 is a denominator)");
  }
  const SortedScores sorted = sorted_desc(p.values());
  double tail = 0.0;
  for (std::size_t i = k; i < sorted.values.size(); ++i) {
    tail += sorted.values[i];
  }
  const bool first = sorted.values[k] > 1.0 / static_cast<double>(k + 1);
  const bool second = tail / static_cast<double>(k - 1) >= sorted.values[k - 1];
  return first && second;
}

bool in_p4(const ProbVector& p, std::size_t k) {
  const SortedScores sorted = sorted_desc(p.values());
  return sorted.values[k - 1] > 1.0 - sigma(p.values(), k);
}

AuditVerdict audit(const RepresentativeSet& reps, const ProbVector& p) {
  const std::size_t k = reps.space.k();
  const std::vector<TopKSet> optimal = prop_topk(p, k);
  const auto is_optimal = [&](const TopKSet& s) {
    return std::binary_search(optimal.begin(), optimal.end(), s);
  };
  AuditVerdict verdict;
  for (std::size_t e : prop_over_reps(reps, p).entries) {
    const std::vector<double>& u = reps.entries[e].embedded;
    const bool linked = is_optimal(argmax_link(u, k));
    bool agnostic = linked;
    if (agnostic) {
      for (const TopKSet& s : top_k_sets(u, k)) {
        if (!is_optimal(s)) {
          agnostic = false;
          break;
        }
      }
    }
    verdict.link_consistent = verdict.link_consistent && linked;
    verdict.link_agnostic_consistent =
        verdict.link_agnostic_consistent && agnostic;
    if (!agnostic) {
      verdict.witnesses.push_back(u);
    }
  }
  return verdict;
}

AuditVerdict audit(LossId id, const LabelSpace& space, const ProbVector& p) {
  return audit(representative_set(id, space), p);
}

std::string to_string(Predicate predicate) {
  switch (predicate) {
    case Predicate::kP2:
      return "p2";
    case Predicate::kP3:
      return "p3";
    case Predicate::kP4:
      return "p4";
    case Predicate::kNone:
      return "none";
  }
  return "unknown";
}

Predicate parse_predicate(std::string_view name) {
  if (name == "p2") return Predicate::kP2;
  if (name == "p3") return Predicate::kP3;
  if (name == "p4") return Predicate::kP4;
  if (name == "none") return Predicate::kNone;
  throw std::invalid_argument("unknown predicate '" + std::string(name) +
                              "' (expected p2, p3, p4 or none)");
}

bool evaluate_predicate(Predicate predicate, const ProbVector& p,
                        std::size_t k) {
  switch (predicate) {
    case Predicate::kP2:
      return in_p2(p, k);
    case Predicate::kP3:
      return in_p3(p, k);
    case Predicate::kP4:
      return in_p4(p, k);
    case Predicate::kNone:
      return true;
  }
  return true;
}

bool near_tie(const ProbVector& p, std::size_t k) {
  const SortedScores sorted = sorted_desc(p.values());
  return sorted.values[k - 1] - sorted.values[k] < kNearTieGap;
}

RegionScan region_scan(const RegionScanConfig& cfg) {
  if (cfg.samples < 1) {
    throw std::invalid_argument("region scan needs at least one sample");
  }
  if (cfg.predicate == Predicate::kP3 && cfg.space.k() < 2) {
    throw std::domain_error("predicate p3 needs k >= 2");
  }
  std::vector<double> alpha = cfg.alpha;
  if (alpha.empty()) {
    alpha.assign(cfg.space.n(), 1.0);
  }
  if (alpha.size() != cfg.space.n()) {
    throw std::invalid_argument("alpha needs one entry per label");
  }
  const RepresentativeSet reps = representative_set(cfg.loss, cfg.space);
  DirichletSampler sampler(alpha, cfg.seed);

  RegionScan scan;
  scan.records.reserve(cfg.samples);
  RegionSummary& sum = scan.summary;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const ProbVector p = sampler.sample();
    const bool pred = evaluate_predicate(cfg.predicate, p, cfg.space.k());
    const AuditVerdict v = audit(reps, p);
    const bool tie = near_tie(p, cfg.space.k());
    scan.records.push_back({i,
                            std::vector<double>(p.values().begin(),
                                                p.values().end()),
                            pred, v.link_consistent,
                            v.link_agnostic_consistent, tie});
    ++sum.samples;
    sum.predicate_true += pred ? 1 : 0;
    sum.predicate_and_consistent += (pred && v.link_consistent) ? 1 : 0;
    sum.link_consistent += v.link_consistent ? 1 : 0;
    sum.link_agnostic += v.link_agnostic_consistent ? 1 : 0;
    sum.near_ties += tie ? 1 : 0;
  }
  if (sum.predicate_true > 0) {
    sum.implication_rate = static_cast<double>(sum.predicate_and_consistent) /
                           static_cast<double>(sum.predicate_true);
  }
  return scan;
}

}  // namespace topk

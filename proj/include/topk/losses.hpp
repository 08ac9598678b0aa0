#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "topk/simplex.hpp"

namespace topk {

enum class LossId { kTopK, kL2, kL3, kL4, kLk };

// "topk" | "l2" | "l3" | "l4" | "lk"
std::string to_string(LossId id);
// Throws std::invalid_argument on an unknown name.
LossId parse_loss_id(std::string_view name);
bool is_surrogate(LossId id);

// A report for expected_loss: a label set for the target loss, scores for the
// surrogates.
using Report = std::variant<TopKSet, ScoreVector>;

using Subgradient = std::vector<double>;

// 1{y not in S}. Throws std::out_of_range if y is not a label of `space`.
double topk_loss(const LabelSpace& space, const TopKSet& s, Label y);

// Surrogates. u has one entry per label, y is a 0-based label and k the size
// of the predicted set.
//
// loss_l2: (1 - u_y + sigma_k(u - e_y) / k)_+
double loss_l2(std::span<const double> u, Label y, std::size_t k);
// loss_l3: (1/k) sum_{i<=k} (1 - u_y + (u - e_y)_[i])_+
double loss_l3(std::span<const double> u, Label y, std::size_t k);
// loss_l4: (1 - u_y + sigma_k(u without y) / k)_+
double loss_l4(std::span<const double> u, Label y, std::size_t k);
// loss_lk: max_m { sigma_m(u)/m + (1 - k/m)_+ } - u_y
double loss_lk(std::span<const double> u, Label y, std::size_t k);

// Dispatch over the four surrogates. Throws std::invalid_argument for kTopK.
double surrogate_loss(LossId id, std::span<const double> u, Label y,
                      std::size_t k);

// <p, L(u, .)> for a surrogate, with pairwise summation.
double expected_surrogate_loss(LossId id, std::span<const double> u,
                               const ProbVector& p, std::size_t k);

// Sum_y p_y loss(report, y). Throws std::invalid_argument when the report kind
// does not match the loss (TopKSet for kTopK, ScoreVector otherwise) or the
// dimensions disagree with `space`.
double expected_loss(LossId id, const Report& report, const ProbVector& p,
                     const LabelSpace& space);

// 1 - sigma_k(p), the minimum expected top-k loss.
double bayes_risk_topk(const ProbVector& p, std::size_t k);

// A deterministic element of the subdifferential of the surrogate at u. Active
// pieces follow sorted_desc tie-breaking; for loss_lk the smallest maximizing
// m is used. A positive part with argument <= 0 contributes nothing.
Subgradient subgradient(LossId id, std::span<const double> u, Label y,
                        std::size_t k);

// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace topk

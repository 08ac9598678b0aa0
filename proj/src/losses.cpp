#include "topk/losses.hpp"

#include <algorithm>
#include <stdexcept>

namespace topk {

std::string to_string(LossId id) {
  switch (id) {
    case LossId::kTopK:
      return "topk";
    case LossId::kL2:
      return "l2";
    case LossId::kL3:
      return "l3";
    case LossId::kL4:
      return "l4";
    case LossId::kLk:
      return "lk";
  }
  return "unknown";
}

LossId parse_loss_id(std::string_view name) {
  if (name == "topk") return LossId::kTopK;
  if (name == "l2") return LossId::kL2;
  if (name == "l3") return LossId::kL3;
  if (name == "l4") return LossId::kL4;
  if (name == "lk") return LossId::kLk;
  throw std::invalid_argument("unknown loss '" + std::string(name) +
                              "' (expected topk, l2, l3, l4 or lk)");
}

bool is_surrogate(LossId id) { return id != LossId::kTopK; }

double topk_loss(const LabelSpace& space, const TopKSet& s, Label y) {
  if (y >= space.n()) {
    throw std::out_of_range("label " + std::to_string(y + 1) +
                            " outside [1, " + std::to_string(space.n()) + "]");
  }
  return s.contains(y) ? 0.0 : 1.0;
}

namespace {

void check_args(std::span<const double> u, Label y, std::size_t k) {
  if (y >= u.size()) {
    throw std::out_of_range("label " + std::to_string(y + 1) +
                            " outside [1, " + std::to_string(u.size()) + "]");
  }
  if (k < 1 || k >= u.size()) {
    throw std::out_of_range("k = " + std::to_string(k) + " invalid for n = " +
                            std::to_string(u.size()));
  }
}

std::vector<double> minus_unit(std::span<const double> u, Label y) {
  std::vector<double> v(u.begin(), u.end());
  v[y] -= 1.0;
  return v;
}

// u with coordinate y removed, and the original labels of what remains.
std::pair<std::vector<double>, LabelSet> drop_coordinate(
    std::span<const double> u, Label y) {
  std::vector<double> v;
  LabelSet labels;
  v.reserve(u.size() - 1);
  labels.reserve(u.size() - 1);
  for (Label i = 0; i < u.size(); ++i) {
    if (i != y) {
      v.push_back(u[i]);
      labels.push_back(i);
    }
  }
  return {std::move(v), std::move(labels)};
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Value of the max form and the smallest maximizing m (1-based).
std::pair<double, std::size_t> lk_outer_max(const std::vector<double>& sorted,
                                            std::size_t k) {
  double best = 0.0;
  std::size_t best_m = 0;
  double prefix = 0.0;
  for (std::size_t m = 1; m <= sorted.size(); ++m) {
    prefix += sorted[m - 1];
    const double md = static_cast<double>(m);
    const double value =
        prefix / md + positive_part(1.0 - static_cast<double>(k) / md);
    if (best_m == 0 || value > best) {
      best = value;
      best_m = m;
    }
  }
  return {best, best_m};
}

}  // namespace

double loss_l2(std::span<const double> u, Label y, std::size_t k) {
  check_args(u, y, k);
  const std::vector<double> v = minus_unit(u, y);
  return positive_part(1.0 - u[y] + sigma(v, k) / static_cast<double>(k));
}

double loss_l3(std::span<const double> u, Label y, std::size_t k) {
  check_args(u, y, k);
  const SortedScores v = sorted_desc(minus_unit(u, y));
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    total += positive_part(1.0 - u[y] + v.values[i]);
  }
  return total / static_cast<double>(k);
}

double loss_l4(std::span<const double> u, Label y, std::size_t k) {
  check_args(u, y, k);
  const auto [rest, labels] = drop_coordinate(u, y);
  return positive_part(1.0 - u[y] + sigma(rest, k) / static_cast<double>(k));
}

double loss_lk(std::span<const double> u, Label y, std::size_t k) {
  check_args(u, y, k);
  const SortedScores s = sorted_desc(u);
  return lk_outer_max(s.values, k).first - u[y];
}

double surrogate_loss(LossId id, std::span<const double> u, Label y,
                      std::size_t k) {
  switch (id) {
    case LossId::kL2:
      return loss_l2(u, y, k);
    case LossId::kL3:
      return loss_l3(u, y, k);
    case LossId::kL4:
      return loss_l4(u, y, k);
    case LossId::kLk:
      return loss_lk(u, y, k);
    case LossId::kTopK:
      break;
  }
  throw std::invalid_argument("surrogate_loss: '" + to_string(id) +
                              "' is not a surrogate");
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double x : values) {
      s += x;
    }
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double expected_surrogate_loss(LossId id, std::span<const double> u,
                               const ProbVector& p, std::size_t k) {
  if (u.size() != p.size()) {
    throw std::invalid_argument("score and probability dimensions differ");
  }
  std::vector<double> terms(p.size());
  for (Label y = 0; y < p.size(); ++y) {
    terms[y] = p[y] == 0.0 ? 0.0 : p[y] * surrogate_loss(id, u, y, k);
  }
  return pairwise_sum(terms);
}

double expected_loss(LossId id, const Report& report, const ProbVector& p,
                     const LabelSpace& space) {
  if (p.size() != space.n()) {
    throw std::invalid_argument("probability vector has " +
                                std::to_string(p.size()) + " entries, expected " +
                                std::to_string(space.n()));
  }
  if (id == LossId::kTopK) {
    const auto* s = std::get_if<TopKSet>(&report);
    if (s == nullptr) {
      throw std::invalid_argument("topk loss needs a label-set report");
    }
    if (s->size() != space.k()) {
      throw std::invalid_argument("top-k report must have exactly k labels");
    }
    std::vector<double> terms(p.size());
    for (Label y = 0; y < p.size(); ++y) {
      terms[y] = p[y] * topk_loss(space, *s, y);
    }
    return pairwise_sum(terms);
  }
  const auto* u = std::get_if<ScoreVector>(&report);
  if (u == nullptr) {
    throw std::invalid_argument(to_string(id) + " loss needs a score report");
  }
  if (u->size() != space.n()) {
    throw std::invalid_argument("score vector has " +
                                std::to_string(u->size()) + " entries, expected " +
                                std::to_string(space.n()));
  }
  return expected_surrogate_loss(id, u->values(), p, space.k());
}

double bayes_risk_topk(const ProbVector& p, std::size_t k) {
  return 1.0 - sigma(p.values(), k);
}

Subgradient subgradient(LossId id, std::span<const double> u, Label y,
                        std::size_t k) {
  check_args(u, y, k);
  const double inv_k = 1.0 / static_cast<double>(k);
  Subgradient g(u.size(), 0.0);
  switch (id) {
    case LossId::kL2: {
      const SortedScores v = sorted_desc(minus_unit(u, y));
      double top = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        top += v.values[i];
      }
      if (1.0 - u[y] + top * inv_k <= 0.0) {
        return g;
      }
      g[y] -= 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        g[v.order[i]] += inv_k;
      }
      return g;
    }
    case LossId::kL3: {
      const SortedScores v = sorted_desc(minus_unit(u, y));
      for (std::size_t i = 0; i < k; ++i) {
        if (1.0 - u[y] + v.values[i] > 0.0) {
          g[v.order[i]] += inv_k;
          g[y] -= inv_k;
        }
      }
      return g;
    }
    case LossId::kL4: {
      const auto [rest, labels] = drop_coordinate(u, y);
      const SortedScores v = sorted_desc(rest);
      double top = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        top += v.values[i];
      }
      if (1.0 - u[y] + top * inv_k <= 0.0) {
        return g;
      }
      g[y] -= 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        g[labels[v.order[i]]] += inv_k;
      }
      return g;
    }
    case LossId::kLk: {
      const SortedScores s = sorted_desc(u);
      const std::size_t m = lk_outer_max(s.values, k).second;
      const double inv_m = 1.0 / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        g[s.order[i]] += inv_m;
      }
      g[y] -= 1.0;
      return g;
    }
    case LossId::kTopK:
      break;
  }
  throw std::invalid_argument("subgradient: '" + to_string(id) +
                              "' is not a surrogate");
}

}  // namespace topk

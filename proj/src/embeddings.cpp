#include "topk/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace topk {

namespace {

bool contains(const LabelSet& set, Label y) {
  return std::find(set.begin(), set.end(), y) != set.end();
}

void check_label(Label y, std::size_t n) {
  if (y >= n) {
    throw std::out_of_range("label " + std::to_string(y + 1) +
                            " outside [1, " + std::to_string(n) + "]");
  }
}

std::size_t partition_labels(const OrderedPartition& q) {
  std::size_t total = 0;
  for (const LabelSet& b : q.blocks) {
    total += b.size();
  }
  return total;
}

void check_enumeration_size(const LabelSpace& space) {
  if (space.n() > kMaxEnumerationLabels) {
    throw std::invalid_argument(
        "representative sets are enumerated for n <= " +
        std::to_string(kMaxEnumerationLabels));
  }
}

std::vector<double> surrogate_rows(LossId id, std::span<const double> u,
                                   std::size_t k) {
  std::vector<double> rows(u.size());
  for (Label y = 0; y < u.size(); ++y) {
    rows[y] = surrogate_loss(id, u, y, k);
  }
  return rows;
}

RepresentativeEntry make_entry(LossId id, DiscreteReport report,
                               std::vector<double> embedded, std::size_t k) {
  RepresentativeEntry e;
  e.rows = surrogate_rows(id, embedded, k);
  e.embedded = std::move(embedded);
  e.reports.push_back(std::move(report));
  return e;
}

}  // namespace

double ell2_hat(const HMReport& r, Label y, std::size_t k) {
  const std::size_t h = r.high.size();
  const std::size_t m = r.medium.size();
  if (h >= k) {
    throw std::invalid_argument("HM report needs |H| < k");
  }
  if (contains(r.high, y)) {
    return 0.0;
  }
  // (|H|+|M|-1)/(k-|H|); the numerator is -1 only for the empty report.
  const double medium_loss = (static_cast<double>(h + m) - 1.0) /
                             static_cast<double>(k - h);
  if (contains(r.medium, y)) {
    return medium_loss;
  }
  return medium_loss + static_cast<double>(k + 1) / static_cast<double>(k);
}

double ell3_hat(const OrderedPartition& q, Label y, std::size_t k) {
  const std::size_t n = partition_labels(q);
  check_label(y, n);
  return loss_l3(embed_partition(q, n), y, k);
}

double ell3_hat_closed_form(const OrderedPartition& q, Label y, std::size_t k) {
  check_label(y, partition_labels(q));
  std::size_t j = 0;
  while (j < q.blocks.size() && !contains(q.blocks[j], y)) {
    ++j;
  }
  const std::size_t s = q.blocks.size() - 1;
  double total = 0.0;
  if (j == 0) {
    for (std::size_t i = 1; i <= s; ++i) {
      total += static_cast<double>(q.blocks[i].size() * (i + 1));
    }
  } else {
    total = static_cast<double>(q.blocks[j].size()) - 1.0;
    for (std::size_t i = j + 1; i <= s; ++i) {
      total += static_cast<double>(q.blocks[i].size() * (i - j + 1));
    }
  }
  return total / static_cast<double>(k);
}

double ell4_hat(const SubsetReport& t, Label y, std::size_t k) {
  if (t.members.size() > k) {
    throw std::invalid_argument("subset report needs |T| <= k");
  }
  if (contains(t.members, y)) {
    return 0.0;
  }
  return static_cast<double>(k + 1) /
         static_cast<double>(k + 1 - t.members.size());
}

double discrete_loss(const DiscreteReport& r, Label y, std::size_t k) {
  return std::visit(
      [&](const auto& report) -> double {
        using T = std::decay_t<decltype(report)>;
        if constexpr (std::is_same_v<T, HMReport>) {
          return ell2_hat(report, y, k);
        } else if constexpr (std::is_same_v<T, OrderedPartition>) {
          return ell3_hat(report, y, k);
        } else if constexpr (std::is_same_v<T, SubsetReport>) {
          return ell4_hat(report, y, k);
        } else {
          return report.contains(y) ? 0.0 : 1.0;
        }
      },
      r);
}

std::vector<double> embed_hm(const HMReport& r, const LabelSpace& space) {
  if (!is_valid(r, space)) {
    throw std::invalid_argument("invalid HM report");
  }
  const double k = static_cast<double>(space.k());
  const double high_level =
      (static_cast<double>(r.medium.size()) + k - 1.0) /
      (k - static_cast<double>(r.high.size()));
  std::vector<double> u(space.n(), 0.0);
  for (Label i : r.high) {
    u[i] = high_level;
  }
  for (Label i : r.medium) {
    u[i] = 1.0;
  }
  return u;
}

std::vector<double> embed_partition(const OrderedPartition& q, std::size_t n) {
  std::vector<double> u(n, 0.0);
  for (std::size_t j = 0; j < q.blocks.size(); ++j) {
    for (Label i : q.blocks[j]) {
      u.at(i) = static_cast<double>(j);
    }
  }
  return u;
}

OrderedPartition partition_from_scores(std::span<const double> u) {
  OrderedPartition q;
  q.blocks.emplace_back();
  for (Label i = 0; i < u.size(); ++i) {
    const double level = std::round(u[i]);
    if (level < 0.0 || std::abs(level - u[i]) > 1e-12) {
      throw std::invalid_argument(
          "partition_from_scores needs nonnegative integer scores");
    }
    const auto j = static_cast<std::size_t>(level);
    if (q.blocks.size() <= j) {
      q.blocks.resize(j + 1);
    }
    q.blocks[j].push_back(i);
  }
  return q;
}

std::vector<double> embed_subset(const SubsetReport& t,
                                 const LabelSpace& space) {
  if (t.members.size() > space.k()) {
    throw std::invalid_argument("subset report needs |T| <= k");
  }
  const double level =
      static_cast<double>(space.k()) /
      static_cast<double>(space.k() + 1 - t.members.size());
  std::vector<double> u(space.n(), 0.0);
  for (Label i : t.members) {
    u.at(i) = level;
  }
  return u;
}

bool is_valid(const HMReport& r, const LabelSpace& space) {
  if (r.high.size() >= space.k() ||
      r.high.size() + r.medium.size() > space.k()) {
    return false;
  }
  std::vector<bool> seen(space.n(), false);
  for (const LabelSet* set : {&r.high, &r.medium}) {
    for (Label i : *set) {
      if (i >= space.n() || seen[i]) {
        return false;
      }
      seen[i] = true;
    }
  }
  return true;
}

bool is_valid(const OrderedPartition& q, const LabelSpace& space) {
  if (q.blocks.empty() || q.blocks.size() > space.k() + 1) {
    return false;
  }
  std::vector<bool> seen(space.n(), false);
  std::size_t total = 0;
  for (std::size_t j = 0; j < q.blocks.size(); ++j) {
    if (j > 0 && q.blocks[j].empty()) {
      return false;
    }
    for (Label i : q.blocks[j]) {
      if (i >= space.n() || seen[i]) {
        return false;
      }
      seen[i] = true;
      ++total;
    }
  }
  return total == space.n() && positive_count(q) <= space.k();
}

std::size_t positive_count(const OrderedPartition& q) {
  return partition_labels(q) - (q.blocks.empty() ? 0 : q.blocks[0].size());
}

double RepresentativeSet::expected_loss(std::size_t entry,
                                        const ProbVector& p) const {
  const std::vector<double>& rows = entries.at(entry).rows;
  std::vector<double> terms(rows.size());
  for (std::size_t y = 0; y < rows.size(); ++y) {
    terms[y] = p[y] * rows[y];
  }
  return pairwise_sum(terms);
}

RepresentativeSet enumerate_r2(const LabelSpace& space) {
  check_enumeration_size(space);
  const std::size_t n = space.n();
  const std::size_t k = space.k();
  RepresentativeSet reps{LossId::kL2, space, {}};
  std::map<std::vector<double>, std::size_t> index_of;

  // Each label is unassigned (0), high (1) or medium (2).
  std::vector<int> bins(n, 0);
  for (;;) {
    HMReport r;
    for (Label i = 0; i < n; ++i) {
      if (bins[i] == 1) r.high.push_back(i);
      if (bins[i] == 2) r.medium.push_back(i);
    }
    if (is_valid(r, space)) {
      std::vector<double> u = embed_hm(r, space);
      auto it = index_of.find(u);
      if (it == index_of.end()) {
        index_of.emplace(u, reps.entries.size());
        reps.entries.push_back(make_entry(LossId::kL2, r, std::move(u), k));
      } else {
        // Aliased reports must carry the same discrete loss row.
        RepresentativeEntry& e = reps.entries[it->second];
        for (Label y = 0; y < n; ++y) {
          if (std::abs(ell2_hat(r, y, k) -
                       discrete_loss(e.reports.front(), y, k)) > kRowTolerance) {
            throw std::logic_error("aliased HM reports disagree on loss rows");
          }
        }
        e.reports.push_back(std::move(r));
      }
    }
    std::size_t pos = 0;
    while (pos < n && bins[pos] == 2) {
      bins[pos++] = 0;
    }
    if (pos == n) {
      break;
    }
    ++bins[pos];
  }
  return reps;
}

RepresentativeSet enumerate_r3(const LabelSpace& space) {
  check_enumeration_size(space);
  const std::size_t n = space.n();
  const std::size_t k = space.k();
  RepresentativeSet reps{LossId::kL3, space, {}};

  // Level sizes |Q_1|, ..., |Q_s|, each >= 1, summing to at most k.
  std::vector<std::vector<std::size_t>> profiles;
  std::vector<std::size_t> sizes;
  std::function<void(std::size_t)> grow = [&](std::size_t used) {
    profiles.push_back(sizes);
    for (std::size_t c = 1; used + c <= k; ++c) {
      sizes.push_back(c);
      grow(used + c);
      sizes.pop_back();
    }
  };
  grow(0);

  for (const auto& profile : profiles) {
    OrderedPartition q;
    q.blocks.resize(profile.size() + 1);
    std::function<void(std::size_t, const LabelSet&)> assign =
        [&](std::size_t level, const LabelSet& remaining) {
          if (level > profile.size()) {
            q.blocks[0] = remaining;
            std::vector<double> u = embed_partition(q, n);
            reps.entries.push_back(make_entry(LossId::kL3, q, std::move(u), k));
            return;
          }
          for (const LabelSet& pick :
               combinations(remaining.size(), profile[level - 1])) {
            LabelSet chosen;
            LabelSet rest;
            std::size_t next = 0;
            for (std::size_t idx = 0; idx < remaining.size(); ++idx) {
              if (next < pick.size() && pick[next] == idx) {
                chosen.push_back(remaining[idx]);
                ++next;
              } else {
                rest.push_back(remaining[idx]);
              }
            }
            q.blocks[level] = std::move(chosen);
            assign(level + 1, rest);
          }
        };
    LabelSet all(n);
    for (Label i = 0; i < n; ++i) {
      all[i] = i;
    }
    assign(1, all);
  }
  return reps;
}

RepresentativeSet enumerate_r4(const LabelSpace& space) {
  check_enumeration_size(space);
  RepresentativeSet reps{LossId::kL4, space, {}};
  for (std::size_t size = 0; size <= space.k(); ++size) {
    for (LabelSet& members : combinations(space.n(), size)) {
      SubsetReport t{std::move(members)};
      std::vector<double> u = embed_subset(t, space);
      reps.entries.push_back(
          make_entry(LossId::kL4, std::move(t), std::move(u), space.k()));
    }
  }
  return reps;
}

RepresentativeSet enumerate_rk(const LabelSpace& space) {
  check_enumeration_size(space);
  RepresentativeSet reps{LossId::kLk, space, {}};
  for (LabelSet& members : combinations(space.n(), space.k())) {
    std::vector<double> u = indicator(members, space.n());
    reps.entries.push_back(make_entry(LossId::kLk, TopKSet(std::move(members)),
                                      std::move(u), space.k()));
  }
  return reps;
}

RepresentativeSet representative_set(LossId id, const LabelSpace& space) {
  switch (id) {
    case LossId::kL2:
      return enumerate_r2(space);
    case LossId::kL3:
      return enumerate_r3(space);
    case LossId::kL4:
      return enumerate_r4(space);
    case LossId::kLk:
      return enumerate_rk(space);
    case LossId::kTopK:
      break;
  }
  throw std::invalid_argument("no representative set for the top-k loss");
}

namespace {

std::vector<std::size_t> argmin_set(const std::vector<double>& values) {
  const double best = *std::min_element(values.begin(), values.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= best + kArgminTolerance) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

EmbeddingReport verify_embedding(const RepresentativeSet& reps,
                                 std::span<const ProbVector> samples) {
  const std::size_t n = reps.space.n();
  const std::size_t k = reps.space.k();
  EmbeddingReport report;
  for (std::size_t e = 0; e < reps.entries.size(); ++e) {
    const RepresentativeEntry& entry = reps.entries[e];
    for (const DiscreteReport& r : entry.reports) {
      const auto* q = std::get_if<OrderedPartition>(&r);
      const bool closed_form = q != nullptr && positive_count(*q) == k;
      if (closed_form) {
        ++report.closed_form_checked;
      }
      for (Label y = 0; y < n; ++y) {
        const double discrete = discrete_loss(r, y, k);
        const double dev = std::abs(entry.rows[y] - discrete);
        report.max_row_deviation = std::max(report.max_row_deviation, dev);
        if (dev > kRowTolerance) {
          report.row_violations.push_back({e, y, entry.rows[y], discrete});
        }
        if (closed_form) {
          report.closed_form_max_deviation =
              std::max(report.closed_form_max_deviation,
                       std::abs(entry.rows[y] - ell3_hat_closed_form(*q, y, k)));
        }
      }
    }
  }

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const ProbVector& p = samples[s];
    std::vector<double> discrete(reps.entries.size());
    std::vector<double> surrogate(reps.entries.size());
    for (std::size_t e = 0; e < reps.entries.size(); ++e) {
      std::vector<double> terms(n);
      for (Label y = 0; y < n; ++y) {
        terms[y] = p[y] * discrete_loss(reps.entries[e].reports.front(), y, k);
      }
      discrete[e] = pairwise_sum(terms);
      surrogate[e] = reps.expected_loss(e, p);
    }
    if (argmin_set(discrete) != argmin_set(surrogate)) {
      report.argmin_violations.push_back(s);
    }
  }
  return report;
}

}  // namespace topk

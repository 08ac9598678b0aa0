#include "topk/json_io.hpp"

namespace topk {

nlohmann::json label_set_json(std::span<const Label> labels) {
  nlohmann::json out = nlohmann::json::array();
  for (Label i : labels) {
    out.push_back(i + 1);
  }
  return out;
}

nlohmann::json to_json(const TopKSet& s) { return label_set_json(s.members()); }

nlohmann::json to_json(const DiscreteReport& r) {
  return std::visit(
      [](const auto& report) -> nlohmann::json {
        using T = std::decay_t<decltype(report)>;
        if constexpr (std::is_same_v<T, HMReport>) {
          return {{"H", label_set_json(report.high)},
                  {"M", label_set_json(report.medium)}};
        } else if constexpr (std::is_same_v<T, OrderedPartition>) {
          nlohmann::json blocks = nlohmann::json::array();
          for (const LabelSet& b : report.blocks) {
            blocks.push_back(label_set_json(b));
          }
          return {{"Q", blocks}};
        } else if constexpr (std::is_same_v<T, SubsetReport>) {
          return {{"T", label_set_json(report.members)}};
        } else {
          return {{"S", to_json(report)}};
        }
      },
      r);
}

nlohmann::json to_json(const RepresentativeSet& reps) {
  nlohmann::json entries = nlohmann::json::array();
  for (const RepresentativeEntry& e : reps.entries) {
    nlohmann::json aliases = nlohmann::json::array();
    for (std::size_t i = 1; i < e.reports.size(); ++i) {
      aliases.push_back(to_json(e.reports[i]));
    }
    entries.push_back({{"report", to_json(e.reports.front())},
                       {"aliases", aliases},
                       {"embed", e.embedded},
                       {"rows", e.rows}});
  }
  return {{"loss", to_string(reps.loss)},
          {"n", reps.space.n()},
          {"k", reps.space.k()},
          {"entries", entries}};
}

nlohmann::json to_json(const PropertyValue& value,
                       const RepresentativeSet& reps) {
  nlohmann::json optima = nlohmann::json::array();
  for (std::size_t e : value.entries) {
    optima.push_back({{"report", to_json(reps.entries[e].reports.front())},
                      {"embed", reps.entries[e].embedded}});
  }
  return {{"min_value", value.min_value}, {"optima", optima}};
}

nlohmann::json to_json(const GreedyTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const GreedyStep& s : trace.steps) {
    steps.push_back({{"candidate", s.candidate + 1},
                     {"threshold", s.threshold},
                     {"accepted", s.accepted}});
  }
  return {{"steps", steps}, {"T", label_set_json(trace.result.members)}};
}

nlohmann::json to_json(const SeparationReport& report) {
  nlohmann::json examples = nlohmann::json::array();
  for (const SeparationViolation& v : report.examples) {
    examples.push_back({{"optimum", v.optimum},
                        {"perturbed", v.perturbed},
                        {"linked", to_json(v.linked)}});
  }
  return {{"trials", report.trials},
          {"violations", report.violations},
          {"radius", report.radius},
          {"examples", examples}};
}

nlohmann::json to_json(const AuditVerdict& verdict) {
  return {{"link_consistent", verdict.link_consistent},
          {"link_agnostic_consistent", verdict.link_agnostic_consistent},
          {"witnesses", verdict.witnesses}};
}

}  // namespace topk

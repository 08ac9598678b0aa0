#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "topk/consistency.hpp"
#include "topk/embeddings.hpp"
#include "topk/properties.hpp"
#include "topk/simplex.hpp"

namespace topk {

// All label sets are written 1-based and ascending.

nlohmann::json label_set_json(std::span<const Label> labels);
nlohmann::json to_json(const TopKSet& s);
nlohmann::json to_json(const DiscreteReport& r);
// {"loss", "n", "k", "entries": [{"report", "aliases", "embed", "rows"}]}
nlohmann::json to_json(const RepresentativeSet& reps);
// {"min_value", "optima": [{"report", "embed"}]}
nlohmann::json to_json(const PropertyValue& value, const RepresentativeSet& reps);
nlohmann::json to_json(const GreedyTrace& trace);
nlohmann::json to_json(const SeparationReport& report);
nlohmann::json to_json(const AuditVerdict& verdict);

}  // namespace topk

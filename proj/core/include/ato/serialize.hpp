#pragma once

#include "ato/demand.hpp"
#include "ato/fosva.hpp"
#include "ato/instance.hpp"
#include "ato/metrics.hpp"
#include "ato/scenario.hpp"

#include <iosfwd>
#include <string>

namespace ato {

// JSON text round-trips. Readers throw ato::Error with a diagnostic on
// malformed input.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

std::string demand_model_to_json(const DemandModel& model);
DemandModel demand_model_from_json(const std::string& text);

std::string history_to_json(const History& history);
History history_from_json(const std::string& text);

std::string value_approx_to_json(const SeasonalValueApprox& value);
SeasonalValueApprox value_approx_from_json(const std::string& text);

/// Depth-first node dump for debugging trees.
std::string tree_to_json(const ScenarioTree& tree);

/// History as CSV: header "month,item_0,...", one row per observed month.
void write_history_csv(std::ostream& os, const History& history);

// File helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// FNV-1a hash of a canonical JSON string, hex-encoded; used for manifests.
std::string content_hash(const std::string& text);

} // namespace ato

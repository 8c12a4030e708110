#pragma once

#include <string>

#include "json.hpp"
#include "mrepp/experiments.hpp"
#include "mrepp/theory.hpp"

namespace mrepp {

using Json = nlohmann::ordered_json;

/// Compact map strings: "mod1:<m>", "lsv:<alpha>".
MapSpec parse_map_string(const std::string& text);
std::string map_to_string(const MapSpec& map);

Json map_to_json(const MapSpec& map);
MapSpec map_from_json(const Json& j);  // accepts object form or the compact string

Json observable_to_json(const ObservableSpec& obs);
ObservableSpec observable_from_json(const Json& j);

Json multiplicity_to_json(const MultiplicityDist& dist);
MultiplicityDist multiplicity_from_json(const Json& j);

Json compound_poisson_to_json(const CompoundPoissonSpec& spec);
CompoundPoissonSpec compound_poisson_from_json(const Json& j);

Json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

std::string kind_to_string(MarkKind kind);
MarkKind kind_from_string(const std::string& s);

}  // namespace mrepp

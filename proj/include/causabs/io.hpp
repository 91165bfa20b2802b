#pragma once

#include <string>

#include <json.hpp>

#include "causabs/diagram.hpp"
#include "causabs/pmf.hpp"
#include "causabs/scm.hpp"

namespace causabs {

using json = nlohmann::json;

// Values are strings internally; integer spellings are written as JSON numbers.
std::string value_from_json(const json& j);
json value_to_json(const std::string& v);
Domain domain_from_json(const json& j);
json domain_to_json(const Domain& d);

Scm scm_from_json(const json& j);
json scm_to_json(const Scm& scm);

Pmf pmf_from_json(const json& j);
json pmf_to_json(const Pmf& p);

CausalDiagram diagram_from_json(const json& j);
NonCausalGraph noncausal_from_json(const json& j);
json graph_to_json(const CausalDiagram& g, const NonCausalGraph* gbar = nullptr);

ValueMap value_map_from_json(const json& j);
json value_map_to_json(const ValueMap& m);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

} // namespace causabs

#pragma once

#include "causabs/abstraction.hpp"
#include "causabs/io.hpp"

namespace causabs {

InterClustering inter_from_json(const json& j);
IntraClustering intra_from_json(const json& j);
// {"inter": [...], "intra": [...]}
json clusters_to_json(const InterClustering& inter, const IntraClustering& intra);
json aic_report_to_json(const AicReport& r, const ConstructiveTau& tau);
json consistency_to_json(const ConsistencyReport& r);

} // namespace causabs

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causabs/abstraction.hpp"
#include "causabs/clustering.hpp"
#include "causabs/diagram.hpp"
#include "causabs/io.hpp"
#include "causabs/ncm.hpp"
#include "causabs/scm.hpp"

namespace causabs {

// Everything a command may need, read from one JSON file. A bare SCM document
// (top-level "variables" and "mechanisms") loads as a project with only "scm".
struct Project {
    std::string dir;  // for relative sample-file paths
    std::optional<Scm> scm;
    std::optional<CausalDiagram> diagram;  // "diagram", else the SCM's induced diagram
    std::optional<NonCausalGraph> noncausal;
    std::optional<Cdag> cdag;  // "cdag", else induced from diagram + clusters
    std::optional<InterClustering> inter;
    IntraClustering intra;
    std::vector<CtfQuery> queries;  // string and structural entries; structural ones use "*" values
    std::vector<InterventionalPmf> datasets;  // default: observational pmf of the SCM
    TrainConfig train;
};

Project load_project(const std::string& path);
Project project_from_json(const json& j, const std::string& dir = ".");

// One assignment per line after a header of variable names; domains come from
// `vars` when given, else from the sorted distinct values seen.
Pmf read_sample_file(const std::string& path, const std::vector<Variable>* vars = nullptr);

// Helpers that fail with a ValidationError naming the missing section.
const Scm& need_scm(const Project& p);
const InterClustering& need_clusters(const Project& p);
const CausalDiagram& need_diagram(const Project& p);
Cdag need_cdag(const Project& p);
std::vector<Variable> low_variables(const Project& p);

} // namespace causabs

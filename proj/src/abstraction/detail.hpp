#pragma once

#include <vector>

#include "causabs/abstraction.hpp"

namespace causabs::detail {

// What a cluster's joint output depends on once excluded variables are
// substituted by their mechanisms.
struct ClusterInputs {
    std::vector<int> parents;  // clusters, ascending
    std::vector<int> exo;      // exogenous blocks, ascending
};

ClusterInputs cluster_inputs(const Scm& scm, const ConstructiveTau& tau, int c);

void require_same_vars(const Scm& scm, const ConstructiveTau& tau);

// Low intervention fixing each parent cluster to a joint index.
std::vector<int> parent_intervention(const Scm& scm, const ConstructiveTau& tau, const std::vector<int>& parents,
                                     const std::vector<std::size_t>& joints);

} // namespace causabs::detail

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "causabs/diagram.hpp"
#include "causabs/query.hpp"

namespace causabs {

struct Cluster {
    std::string name;
    std::vector<std::string> members;
    bool operator==(const Cluster&) const = default;
};

// Disjoint non-empty clusters over a subset of the variables.
struct InterClustering {
    std::vector<Cluster> clusters;

    int size() const { return static_cast<int>(clusters.size()); }
    int cluster_of(const std::string& var) const;  // -1 when excluded
    int find(const std::string& cluster_name) const;
    Names members() const;
    std::vector<Names> sets() const;
    void validate() const;
};

// Clusters of single variables named after them.
InterClustering singleton_clustering(const std::vector<std::string>& vars);
// Names a member set: the variable itself, or members joined by '+'.
std::string default_cluster_name(const std::vector<std::string>& members);
// Order-insensitive comparison of member sets.
bool same_partition(const InterClustering& a, const InterClustering& b);

// Removes the nodes outside `keep` by latent projection.
CausalDiagram latent_project(const CausalDiagram& g, const Names& keep);
bool check_admissible(const InterClustering& inter, const CausalDiagram& g);
// Quotient of the projected diagram; throws ValidationError on inadmissible input.
Cdag induce_cdag(const CausalDiagram& g, const InterClustering& inter);

// Merges every strongly connected group of clusters of the quotient.
InterClustering merge_cycles(const InterClustering& inter, const CausalDiagram& g);
InterClustering min_clustering(const NonCausalGraph& gbar, const CausalDiagram& g);

enum class Unmentioned { Exclude, Singleton };
// Cells of the Venn diagram of every outcome and intervention set in the queries.
InterClustering max_answerable_clustering(const std::vector<CtfQuery>& queries,
                                          const std::vector<std::string>& all_vars,
                                          Unmentioned policy = Unmentioned::Exclude);

// a coarser than b.
bool coarser_than(const InterClustering& a, const InterClustering& b);
bool answerable(const CtfQuery& q, const InterClustering& inter);
// Rewrites the variable sets of q as cluster names; values become "*".
CtfQuery lift_query_shape(const CtfQuery& q, const InterClustering& inter);

using IdOracle = std::function<bool(const CtfQuery& lifted, const Cdag& cdag)>;
// Complete interventional identification; counterfactual shapes throw UnsupportedQuery.
bool default_id_oracle(const CtfQuery& lifted, const Cdag& cdag);

struct ChooseOptions {
    // Lets the loop drop variables that no query mentions. Off by default: such
    // variables stay as singleton clusters.
    bool project_unqueried = false;
};

struct ChooseResult {
    std::optional<InterClustering> clusters;  // empty on FAIL
    std::string reason;
    InterClustering c_min, c_max;
};

ChooseResult choose_clusters(const CausalDiagram& g, const NonCausalGraph& gbar,
                             const std::vector<CtfQuery>& queries, const IdOracle& oracle = default_id_oracle,
                             const ChooseOptions& opt = {});

// Conditions checked independently of choose_clusters.
struct ConditionReport {
    bool c1 = false;  // no noncausal edge crosses clusters
    bool c2 = false;  // admissible
    bool c3 = false;  // every query answerable
    bool c4 = false;  // every query identifiable on the C-DAG
};
ConditionReport check_conditions(const InterClustering& inter, const CausalDiagram& g,
                                 const NonCausalGraph& gbar, const std::vector<CtfQuery>& queries,
                                 const IdOracle& oracle = default_id_oracle);

} // namespace causabs

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "causabs/clustering.hpp"
#include "causabs/errors.hpp"
#include "causabs/pmf.hpp"
#include "causabs/query.hpp"
#include "causabs/scm.hpp"

namespace causabs {

// One high-level value and the low-level cluster tuples mapped to it. Tuples
// list values in the cluster's member order.
struct Block {
    std::string label;
    std::vector<std::vector<std::string>> values;
};

struct ClusterBlocks {
    std::string cluster;
    std::vector<Block> blocks;
};

struct IntraClustering {
    std::vector<ClusterBlocks> clusters;
    const ClusterBlocks* find(const std::string& cluster) const;
};

// Singleton blocks; labels are the tuple values joined by '_'.
ClusterBlocks singleton_blocks(const std::string& cluster, const std::vector<Variable>& members);

class ConstructiveTau {
public:
    ConstructiveTau() = default;
    // Clusters missing from intra get singleton blocks.
    ConstructiveTau(std::vector<Variable> low_vars, InterClustering inter, const IntraClustering& intra);

    const std::vector<Variable>& low_vars() const { return low_; }
    const InterClustering& inter() const { return inter_; }
    const IntraClustering& intra() const { return intra_; }
    const std::vector<Variable>& high_vars() const { return high_; }  // one per cluster, same order
    int n_clusters() const { return inter_.size(); }
    int low_index(const std::string& name) const;  // throws

    const std::vector<int>& members(int c) const { return member_ix_[c]; }  // indices into low_vars
    const std::vector<int>& radix(int c) const { return radix_[c]; }
    // High value index of a cluster joint index.
    int image(int c, std::size_t joint) const { return image_[c][joint]; }
    // Same, reading the cluster members from a full low assignment.
    int image_of(int c, const std::vector<int>& low_values) const;
    // Joint indices mapped to high value h, ascending.
    const std::vector<std::size_t>& preimage(int c, int h) const { return pre_[c][h]; }
    std::vector<int> decode_joint(int c, std::size_t joint) const;

    // Maps an assignment covering a union of clusters exactly.
    ValueMap apply(const ValueMap& low) const;

private:
    std::vector<Variable> low_, high_;
    InterClustering inter_;
    IntraClustering intra_;
    std::vector<std::vector<int>> member_ix_, radix_, image_;
    std::vector<std::vector<std::vector<std::size_t>>> pre_;
};

ConstructiveTau build_tau(const std::vector<Variable>& low_vars, const InterClustering& inter,
                          const IntraClustering& intra);
ValueMap apply_tau(const ConstructiveTau& tau, const ValueMap& low);

// Low query to high query. Each outcome and intervention set must be a union of clusters.
CtfQuery lift_query(const ConstructiveTau& tau, const CtfQuery& q_low);

// Preimage description of a query: each term keeps a low-level intervention
// and asks that every listed cluster land in the block of a high value.
struct LowTerm {
    std::vector<Setting> intervention;      // low variables
    std::vector<std::pair<int, int>> outcome;  // (cluster, high value)
};
struct LoweredQuery {
    std::vector<LowTerm> terms;
    std::vector<LowTerm> given;
};

// High query to its preimage event. High interventions use the first preimage
// of each intervened cluster.
LoweredQuery lower_query(const ConstructiveTau& tau, const CtfQuery& q_high);
// Preimage event of a low query, keeping its own interventions.
LoweredQuery preimage_event(const ConstructiveTau& tau, const CtfQuery& q_low);
// High query described by a lowered one.
CtfQuery lift_lowered(const ConstructiveTau& tau, const LoweredQuery& lq);
// Sum over the preimage of low-level counterfactual probabilities.
double lowered_prob(const Scm& m_low, const ConstructiveTau& tau, const LoweredQuery& lq,
                    const EvalOptions& opt = {});

// Pushforward of a low pmf onto the high variables. Unclustered variables may be absent.
Pmf push_pmf(const ConstructiveTau& tau, const Pmf& low);
// Same, mapping the dataset's intervention too (it must cover whole clusters).
InterventionalPmf push_dataset(const ConstructiveTau& tau, const InterventionalPmf& low);

// For the data checks, u holds the high-level event and out1/out2 the two
// probabilities that differ.
struct AicWitness {
    int cluster = -1;
    ValueMap v1, v2;  // parent cluster values sharing a τ image
    ValueMap u;
    std::string out1, out2;  // high value of the cluster under each
};

struct AicReport {
    bool holds = true;
    std::optional<AicWitness> witness;
};

class AicError : public Error {
public:
    AicError(const std::string& msg, AicReport r) : Error(msg), report(std::move(r)) {}
    AicReport report;
};

AicReport check_aic(const Scm& scm, const ConstructiveTau& tau, const EvalOptions& opt = {});

enum class DataAicMode { Conditional, Interventional };

// Conditional mode reads the dataset with empty intervention.
AicReport check_data_aic(const std::vector<InterventionalPmf>& dists, const ConstructiveTau& tau,
                         DataAicMode mode, double tol = 1e-9);

struct Abstraction {
    ConstructiveTau tau;
    Scm high;
};

// Builds M_H with U_H = U_L. Throws AicError when the AIC fails.
Abstraction construct_abstraction(const Scm& scm, const InterClustering& inter, const IntraClustering& intra,
                                  const EvalOptions& opt = {});

struct ConsistencyReport {
    bool consistent = true;
    double low = 0, high = 0;  // values at the first mismatch, or of the single query
    std::string detail;
};

ConsistencyReport check_q_tau_consistency(const Scm& m_low, const Scm& m_high, const ConstructiveTau& tau,
                                          const CtfQuery& q_low, double tol = 1e-9,
                                          const EvalOptions& opt = {});

struct LayerOptions {
    double tol = 1e-9;
    int worlds = 2;  // layer 3 only
    EvalOptions eval;
};

ConsistencyReport check_layer_tau_consistency(const Scm& m_low, const Scm& m_high, const ConstructiveTau& tau,
                                              int layer, const LayerOptions& opt = {});

// A permutation of joint indices of a cluster domain.
using Permutation = std::vector<std::size_t>;
Permutation swap_generator(const std::vector<Variable>& members, int a, int b);
Permutation cyclic_generator(const std::vector<Variable>& members);
ClusterBlocks orbit_intra_clustering(const std::string& cluster, const std::vector<Variable>& members,
                                     const std::vector<Permutation>& generators);

} // namespace causabs

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "causabs/diagram.hpp"
#include "causabs/pmf.hpp"
#include "causabs/query.hpp"
#include "causabs/scm.hpp"

namespace causabs {

enum class Optimizer { Adam, Gd };

struct TrainConfig {
    double lr = 0.05;
    int iterations = 1500;
    Optimizer optimizer = Optimizer::Adam;
    // query weight, log-decayed from start to end over the run
    double lambda_start = 1.0;
    double lambda_end = 1e-3;
    std::uint64_t seed = 0;
    int n_c = 0;  // exogenous cardinality per clique; 0 = min(canonical bound, 64)
    double init_scale = 0.1;
    int record_every = 10;
};

// Maximal cliques of the bidirected part. Nodes without bidirected edges form
// singleton cliques. Each clique lists node indices ascending; cliques are sorted.
std::vector<std::vector<int>> bidirected_cliques(const CausalDiagram& g);

// Graph-constrained model: one categorical exogenous per clique, softmax response
// rows per (parent values, values of the cliques containing the node), and a
// per-node uniform realized by inverse CDF under the domain order.
class Ncm {
public:
    using Vec = Eigen::VectorXd;
    using Mat = Eigen::MatrixXd;

    Ncm() = default;
    Ncm(const Cdag& g, std::vector<Domain> domains, const TrainConfig& cfg = {});

    const Cdag& graph() const { return g_; }
    int n_nodes() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    int node_index(const std::string& name) const;  // throws
    const Domain& domain(int v) const { return dom_[v]; }
    std::vector<Variable> variables() const;
    const std::vector<int>& order() const { return order_; }
    const std::vector<int>& parents(int v) const { return pa_[v]; }
    const std::vector<std::vector<int>>& cliques() const { return cliques_; }
    const std::vector<int>& cliques_of(int v) const { return cl_of_[v]; }
    int clique_size(int c) const { return static_cast<int>(cl_logit_[c].size()); }
    double unit_count() const;

    Vec& clique_logits(int c) { return cl_logit_[c]; }
    const Vec& clique_logits(int c) const { return cl_logit_[c]; }
    Mat& response_logits(int v) { return resp_logit_[v]; }
    const Mat& response_logits(int v) const { return resp_logit_[v]; }

    // Row of v's table for parent values (ordered like parents(v)) and the full
    // exogenous assignment (one value per clique).
    int row(int v, const std::vector<int>& pa_values, const std::vector<int>& u) const;

    // Flat parameters: clique logits in clique order, then each node's response
    // logits row-major in node order.
    int n_params() const;
    Vec params() const;
    void set_params(const Vec& p);

    // Hard encodings; zero probabilities become -inf logits.
    void set_clique_pmf(int c, const std::vector<double>& p);
    void set_response_row(int v, int row, const std::vector<double>& p);

    void resize_clique(int c, int n);

private:
    Cdag g_;
    std::vector<std::string> names_;
    std::vector<Domain> dom_;
    std::vector<int> order_;
    std::vector<std::vector<int>> pa_, cliques_, cl_of_;
    std::vector<Vec> cl_logit_;
    std::vector<Mat> resp_logit_;
};

Ncm build_ncm(const Cdag& g, const std::vector<Domain>& domains, const TrainConfig& cfg = {});

// Hard-table encoding of an explicit SCM on g (default: its induced diagram).
// Every exogenous block goes to the first clique containing all of its children.
Ncm ncm_from_scm(const Scm& scm, const Cdag* g = nullptr);

// Joint pmf over all nodes under do(intervention).
Pmf induced_pmf(const Ncm& m, const ValueMap& intervention, const EvalOptions& opt = {});
// Σ_v weights[v] P(v | do(x)) with its gradient w.r.t. params() when grad is set.
double induced_pmf_dot(const Ncm& m, const ValueMap& intervention, const std::vector<double>& weights,
                       Eigen::VectorXd* grad = nullptr, const EvalOptions& opt = {});
// Multi-world probability. Conditionals are ratios; a zero-mass condition throws.
double ctf_pmf(const Ncm& m, const CtfQuery& q, Eigen::VectorXd* grad = nullptr, const EvalOptions& opt = {});
// -Σ data(d) log P_model(d) over the data's variables.
double cross_entropy(const Ncm& m, const InterventionalPmf& data, Eigen::VectorXd* grad = nullptr,
                     const EvalOptions& opt = {});

struct QueryReg {
    CtfQuery query;
    double sign = 1.0;  // loss adds sign * lambda * Q: +1 pushes Q down, -1 pushes it up
};

struct SeriesPoint {
    int iteration = 0;
    double data_loss = 0;
    double query_value = 0;
    double lambda = 0;
};

struct FitResult {
    double initial_data_loss = 0;
    double data_loss = 0;
    double data_entropy = 0;  // lower bound of data_loss
    std::optional<double> query_value;
    std::vector<SeriesPoint> series;
};

// Fits m in place. Throws Error when the loss stops being finite.
FitResult fit(Ncm& m, const std::vector<InterventionalPmf>& data, const std::optional<QueryReg>& reg,
              const TrainConfig& cfg, const EvalOptions& opt = {});

struct SampleOptions {
    int max_attempts_factor = 1000;  // attempts allowed per requested sample
};

// Draws the outcome world do(intervention), keeping only units where the given
// factual or counterfactual terms hold.
std::vector<ValueMap> sample(const Ncm& m, const std::vector<Term>& given, const ValueMap& intervention, int n,
                             std::uint64_t seed, const SampleOptions& opt = {});

// Linear autoencoder per cluster with an optional logistic auxiliary head.
struct RepMap {
    Eigen::MatrixXd enc, dec;  // rep_dim x d, d x rep_dim
    Eigen::VectorXd enc_bias, dec_bias;
    Eigen::VectorXd aux_w;     // logistic head on the representation, empty if unused
    double aux_b = 0;

    Eigen::MatrixXd encode(const Eigen::MatrixXd& x) const;  // rows are samples
    Eigen::MatrixXd decode(const Eigen::MatrixXd& z) const;
};

struct RepConfig {
    int rep_dim = 8;
    double lambda_r = 0.0;
    double lr = 0.01;
    int iterations = 3000;
    std::uint64_t seed = 0;
};

struct RepResult {
    RepMap map;
    double reconstruction = 0;  // mean squared error per sample
    double aux_loss = 0;
};

// labels: 0/1 per row, required when lambda_r > 0.
RepResult fit_representation(const Eigen::MatrixXd& data, const RepConfig& cfg,
                             const std::vector<int>* labels = nullptr);

struct LinearProbe {
    Eigen::VectorXd w;
    double b = 0;
    double accuracy(const Eigen::MatrixXd& x, const std::vector<int>& labels) const;
};
LinearProbe fit_linear_probe(const Eigen::MatrixXd& x, const std::vector<int>& labels, int iterations = 2000,
                             double lr = 0.1);

} // namespace causabs

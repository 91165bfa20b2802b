#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "causabs/ncm.hpp"

namespace causabs::detail {

// Softmax probabilities of every clique and response row, plus row CDFs.
struct Probs {
    std::vector<Eigen::VectorXd> clique;
    std::vector<Eigen::MatrixXd> resp, cdf;
};
Probs probs(const Ncm& m);

// Gradients w.r.t. the probabilities in Probs.
struct Grads {
    std::vector<Eigen::VectorXd> clique;
    std::vector<Eigen::MatrixXd> resp;
    static Grads zeros(const Ncm& m);
};
// Chains probability gradients through the softmaxes into params() layout.
Eigen::VectorXd to_logit_grad(const Ncm& m, const Probs& p, const Grads& g);

std::vector<int> resolve_intervention(const Ncm& m, const ValueMap& x);

struct EngineWorld {
    std::vector<int> intervention;  // per node, -1 = free
    std::vector<int> require;       // per node, -1 = any
    bool impossible = false;
};

std::vector<EngineWorld> query_worlds(const Ncm& m, const std::vector<Term>& terms);

// Leaf value given per-world node values and the path probability.
using Leaf = std::function<double(const std::vector<std::vector<int>>&, double)>;

// Enumerates exogenous units and, per unit, joint node values across worlds.
// A node's free worlds share its realization uniform, so a joint choice
// weighs the length of the intersection of the chosen CDF intervals.
class Engine {
public:
    Engine(const Ncm& m, const Probs& p, std::vector<EngineWorld> worlds);
    // Σ over units and consistent choices of P(path) * leaf. Adds scale * gradient to g.
    double run(const Leaf& leaf, Grads* g, double scale, const EvalOptions& opt);

private:
    double rec(std::size_t k, double up);

    const Ncm& m_;
    const Probs& p_;
    std::vector<EngineWorld> worlds_;
    std::vector<std::vector<int>> vals_;
    std::vector<int> u_, pa_buf_;
    const Leaf* leaf_ = nullptr;
    Grads* g_ = nullptr;
    double scale_ = 1;
};

} // namespace causabs::detail

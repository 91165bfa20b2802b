#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "causabs/errors.hpp"
#include "causabs/ncm.hpp"
#include "engine.hpp"

namespace causabs::detail {

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& l) {
    double mx = l.maxCoeff();
    Eigen::VectorXd e = (l.array() - mx).exp();
    return e / e.sum();
}

} // namespace

Probs probs(const Ncm& m) {
    Probs p;
    for (std::size_t c = 0; c < m.cliques().size(); ++c) p.clique.push_back(softmax(m.clique_logits(static_cast<int>(c))));
    for (int v = 0; v < m.n_nodes(); ++v) {
        const auto& l = m.response_logits(v);
        Eigen::MatrixXd q(l.rows(), l.cols()), cdf(l.rows(), l.cols());
        for (int r = 0; r < l.rows(); ++r) {
            q.row(r) = softmax(l.row(r).transpose()).transpose();
            double s = 0;
            for (int k = 0; k < l.cols(); ++k) cdf(r, k) = (s += q(r, k));
            cdf(r, l.cols() - 1) = 1.0;
        }
        p.resp.push_back(std::move(q));
        p.cdf.push_back(std::move(cdf));
    }
    return p;
}

Grads Grads::zeros(const Ncm& m) {
    Grads g;
    for (std::size_t c = 0; c < m.cliques().size(); ++c) g.clique.push_back(Eigen::VectorXd::Zero(m.clique_size(static_cast<int>(c))));
    for (int v = 0; v < m.n_nodes(); ++v)
        g.resp.push_back(Eigen::MatrixXd::Zero(m.response_logits(v).rows(), m.response_logits(v).cols()));
    return g;
}

Eigen::VectorXd to_logit_grad(const Ncm& m, const Probs& p, const Grads& g) {
    Eigen::VectorXd out(m.n_params());
    int k = 0;
    for (std::size_t c = 0; c < g.clique.size(); ++c) {
        const auto& s = p.clique[c];
        double dot = s.dot(g.clique[c]);
        for (int i = 0; i < s.size(); ++i) out[k++] = s[i] * (g.clique[c][i] - dot);
    }
    for (int v = 0; v < m.n_nodes(); ++v) {
        const auto& s = p.resp[v];
        const auto& gv = g.resp[v];
        for (int r = 0; r < s.rows(); ++r) {
            double dot = s.row(r).dot(gv.row(r));
            for (int c = 0; c < s.cols(); ++c) out[k++] = s(r, c) * (gv(r, c) - dot);
        }
    }
    return out;
}

std::vector<int> resolve_intervention(const Ncm& m, const ValueMap& x) {
    std::vector<int> out(m.n_nodes(), -1);
    for (const auto& [k, v] : x) {
        int i = m.node_index(k);
        out[i] = m.domain(i).index(v);
    }
    return out;
}

Engine::Engine(const Ncm& m, const Probs& p, std::vector<EngineWorld> worlds)
    : m_(m), p_(p), worlds_(std::move(worlds)) {
    vals_.assign(worlds_.size(), std::vector<int>(m.n_nodes(), -1));
}

double Engine::run(const Leaf& leaf, Grads* g, double scale, const EvalOptions& opt) {
    if (m_.unit_count() * static_cast<double>(std::max<std::size_t>(1, worlds_.size())) > opt.budget)
        throw BudgetError("model evaluation exceeds the enumeration budget");
    leaf_ = &leaf;
    g_ = g;
    scale_ = scale;
    std::size_t nc = m_.cliques().size();
    std::vector<int> radix;
    for (std::size_t c = 0; c < nc; ++c) radix.push_back(m_.clique_size(static_cast<int>(c)));
    u_.assign(nc, 0);
    double total = 0;
    do {
        double pu = 1;
        for (std::size_t c = 0; c < nc; ++c) pu *= p_.clique[c][u_[c]];
        if (pu == 0) continue;  // softmax gradient vanishes there too
        double s = rec(0, pu);
        total += pu * s;
        if (g && s != 0) {
            for (std::size_t c = 0; c < nc; ++c) {
                double others = 1;
                for (std::size_t d = 0; d < nc; ++d)
                    if (d != c) others *= p_.clique[d][u_[d]];
                g->clique[c][u_[c]] += scale * others * s;
            }
        }
    } while (next_digits(u_, radix));
    return total;
}

double Engine::rec(std::size_t k, double up) {
    if (k == m_.order().size()) return (*leaf_)(vals_, up);
    int v = m_.order()[k];
    std::vector<int> free, rows;
    for (std::size_t w = 0; w < worlds_.size(); ++w) {
        int x = worlds_[w].intervention[v];
        if (x >= 0) {
            vals_[w][v] = x;
            continue;
        }
        free.push_back(static_cast<int>(w));
        pa_buf_.clear();
        for (int p : m_.parents(v)) pa_buf_.push_back(vals_[w][p]);
        rows.push_back(m_.row(v, pa_buf_, u_));
    }
    if (free.empty()) return rec(k + 1, up);

    const auto& q = p_.resp[v];
    const auto& cdf = p_.cdf[v];
    int dv = m_.domain(v).size();
    std::size_t nf = free.size();
    std::vector<int> choice(nf, 0), radix(nf, dv);
    double total = 0;
    do {
        bool ok = true;
        for (std::size_t i = 0; i < nf && ok; ++i) {
            int req = worlds_[free[i]].require[v];
            ok = req < 0 || req == choice[i];
        }
        if (!ok) continue;
        double len;
        int hi_w = 0, lo_w = -1;
        if (nf == 1) {
            len = q(rows[0], choice[0]);
        } else {
            double hi = 2, lo = -1;
            for (std::size_t i = 0; i < nf; ++i) {
                double h = cdf(rows[i], choice[i]);
                double l = choice[i] > 0 ? cdf(rows[i], choice[i] - 1) : 0.0;
                if (h < hi) hi = h, hi_w = static_cast<int>(i);
                if (l > lo) lo = l, lo_w = static_cast<int>(i);
            }
            len = hi - lo;
        }
        if (len <= 0) continue;
        for (std::size_t i = 0; i < nf; ++i) vals_[free[i]][v] = choice[i];
        double sub = rec(k + 1, up * len);
        if (g_ && sub != 0) {
            double d = scale_ * up * sub;
            auto& gv = g_->resp[v];
            if (nf == 1) {
                gv(rows[0], choice[0]) += d;
            } else {
                int ch = choice[hi_w], rh = rows[hi_w];
                if (ch < dv - 1)
                    for (int j = 0; j <= ch; ++j) gv(rh, j) += d;
                if (lo_w >= 0) {
                    int cl = choice[lo_w], rl = rows[lo_w];
                    if (cl > 0)
                        for (int j = 0; j < cl; ++j) gv(rl, j) -= d;
                }
            }
        }
        total += len * sub;
    } while (next_digits(choice, radix));
    return total;
}

std::vector<EngineWorld> query_worlds(const Ncm& m, const std::vector<Term>& terms) {
    std::vector<EngineWorld> out;
    for (const auto& t : terms) {
        EngineWorld w;
        w.intervention.assign(m.n_nodes(), -1);
        w.require.assign(m.n_nodes(), -1);
        for (const auto& [x, val] : t.intervention) {
            int i = m.node_index(x);
            if (w.intervention[i] >= 0) throw ValidationError("variable " + x + " intervened twice");
            w.intervention[i] = m.domain(i).index(val);
        }
        for (const auto& [y, val] : t.outcome) {
            int i = m.node_index(y);
            int vi = m.domain(i).index(val);
            if (w.intervention[i] >= 0) {
                if (w.intervention[i] != vi) w.impossible = true;
                continue;
            }
            if (w.require[i] >= 0 && w.require[i] != vi) w.impossible = true;
            w.require[i] = vi;
        }
        out.push_back(std::move(w));
    }
    return out;
}

} // namespace causabs::detail

namespace causabs {

using detail::Engine;
using detail::EngineWorld;

namespace {

EngineWorld single_world(const Ncm& m, const ValueMap& intervention) {
    EngineWorld w;
    w.intervention = detail::resolve_intervention(m, intervention);
    w.require.assign(m.n_nodes(), -1);
    return w;
}

// Σ_leaf weight(leaf) P(leaf) for a conjunction of worlds, with gradient.
double conjunction(const Ncm& m, const detail::Probs& p, const std::vector<EngineWorld>& ws, detail::Grads* g,
                   double scale, const EvalOptions& opt) {
    for (const auto& w : ws)
        if (w.impossible) return 0.0;
    Engine e(m, p, ws);
    detail::Leaf one = [](const std::vector<std::vector<int>>&, double) { return 1.0; };
    return e.run(one, g, scale, opt);
}

} // namespace

Pmf induced_pmf(const Ncm& m, const ValueMap& intervention, const EvalOptions& opt) {
    auto p = detail::probs(m);
    Pmf out = Pmf::zeros(m.variables());
    auto radix = out.radix();
    Engine e(m, p, {single_world(m, intervention)});
    detail::Leaf rec = [&](const std::vector<std::vector<int>>& vals, double up) {
        out.prob[encode(vals[0], radix)] += up;
        return 1.0;
    };
    e.run(rec, nullptr, 1.0, opt);
    return out;
}

double induced_pmf_dot(const Ncm& m, const ValueMap& intervention, const std::vector<double>& weights,
                       Eigen::VectorXd* grad, const EvalOptions& opt) {
    auto p = detail::probs(m);
    auto vars = m.variables();
    std::vector<int> radix;
    for (const auto& v : vars) radix.push_back(v.domain.size());
    if (weights.size() != product_size(radix)) throw ValidationError("weight vector has the wrong size");
    Engine e(m, p, {single_world(m, intervention)});
    detail::Leaf leaf = [&](const std::vector<std::vector<int>>& vals, double) { return weights[encode(vals[0], radix)]; };
    auto g = detail::Grads::zeros(m);
    double val = e.run(leaf, grad ? &g : nullptr, 1.0, opt);
    if (grad) *grad = detail::to_logit_grad(m, p, g);
    return val;
}

double ctf_pmf(const Ncm& m, const CtfQuery& q, Eigen::VectorXd* grad, const EvalOptions& opt) {
    auto p = detail::probs(m);
    auto terms = detail::query_worlds(m, q.terms);
    auto given = detail::query_worlds(m, q.given);
    std::vector<EngineWorld> joint = given;
    joint.insert(joint.end(), terms.begin(), terms.end());
    if (given.empty()) {
        auto g = detail::Grads::zeros(m);
        double v = conjunction(m, p, joint, grad ? &g : nullptr, 1.0, opt);
        if (grad) *grad = detail::to_logit_grad(m, p, g);
        return v;
    }
    double den = conjunction(m, p, given, nullptr, 1.0, opt);
    if (den <= 0) throw UndefinedConditional("conditioning event has probability zero under the model");
    double num = conjunction(m, p, joint, nullptr, 1.0, opt);
    double val = num / den;
    if (grad) {
        // d(N/D) = dN/D - (N/D) dD/D
        auto g = detail::Grads::zeros(m);
        conjunction(m, p, joint, &g, 1.0 / den, opt);
        conjunction(m, p, given, &g, -val / den, opt);
        *grad = detail::to_logit_grad(m, p, g);
    }
    return val;
}

double cross_entropy(const Ncm& m, const InterventionalPmf& data, Eigen::VectorXd* grad, const EvalOptions& opt) {
    auto p = detail::probs(m);
    // data column of each model node, -1 when the data omits it
    std::vector<int> col(m.n_nodes(), -1);
    for (std::size_t i = 0; i < data.pmf.vars.size(); ++i) {
        int v = m.node_index(data.pmf.vars[i].name);
        if (!(data.pmf.vars[i].domain == m.domain(v)))
            throw ValidationError("data domain of " + data.pmf.vars[i].name + " differs from the model");
        col[v] = static_cast<int>(i);
    }
    auto radix = data.pmf.radix();
    std::vector<int> d(radix.size());
    auto key = [&](const std::vector<int>& vals) {
        for (int v = 0; v < m.n_nodes(); ++v)
            if (col[v] >= 0) d[col[v]] = vals[v];
        return encode(d, radix);
    };
    Engine e(m, p, {single_world(m, data.intervention)});
    std::vector<double> model(data.pmf.prob.size(), 0.0);
    detail::Leaf rec = [&](const std::vector<std::vector<int>>& vals, double up) {
        model[key(vals[0])] += up;
        return 1.0;
    };
    e.run(rec, nullptr, 1.0, opt);
    double ce = 0;
    std::vector<double> w(model.size(), 0.0);
    for (std::size_t j = 0; j < model.size(); ++j) {
        double t = data.pmf.prob[j];
        if (t <= 0) continue;
        if (model[j] <= 0) return std::numeric_limits<double>::infinity();
        ce -= t * std::log(model[j]);
        w[j] = -t / model[j];
    }
    if (grad) {
        auto g = detail::Grads::zeros(m);
        Engine e2(m, p, {single_world(m, data.intervention)});
        detail::Leaf leaf = [&](const std::vector<std::vector<int>>& vals, double) { return w[key(vals[0])]; };
        e2.run(leaf, &g, 1.0, opt);
        *grad = detail::to_logit_grad(m, p, g);
    }
    return ce;
}

} // namespace causabs

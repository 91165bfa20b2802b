#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "causabs/errors.hpp"
#include "causabs/inference.hpp"
#include "causabs/ncm.hpp"

namespace causabs {

namespace {

constexpr int kMaxDefaultNc = 64;

// Π_{V∈C} |D_V|^{|D_Pa(V)|}, capped.
int canonical_size(const std::vector<int>& clique, const std::vector<Domain>& dom,
                   const std::vector<std::vector<int>>& pa, int cap) {
    double n = 1;
    for (int v : clique) {
        double cfg = 1;
        for (int p : pa[v]) cfg *= dom[p].size();
        n *= std::pow(static_cast<double>(dom[v].size()), cfg);
        if (n >= cap) return cap;
    }
    return static_cast<int>(std::max(1.0, n));
}

} // namespace

Ncm::Ncm(const Cdag& g, std::vector<Domain> domains, const TrainConfig& cfg) : g_(g), names_(g.nodes()), dom_(std::move(domains)) {
    int n = n_nodes();
    if (static_cast<int>(dom_.size()) != n) throw ValidationError("one domain per node is required");
    for (const auto& d : dom_)
        if (d.size() < 1) throw ValidationError("empty node domain");
    for (const auto& name : g_.topological_order()) order_.push_back(node_index(name));
    pa_.resize(n);
    for (int v = 0; v < n; ++v) {
        auto ps = g_.parents(names_[v]);
        for (const auto& name : names_)  // graph order keeps rows stable
            if (ps.count(name)) pa_[v].push_back(node_index(name));
    }
    cliques_ = bidirected_cliques(g_);
    cl_of_.resize(n);
    for (std::size_t c = 0; c < cliques_.size(); ++c)
        for (int v : cliques_[c]) cl_of_[v].push_back(static_cast<int>(c));

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(-cfg.init_scale, cfg.init_scale);
    for (const auto& cl : cliques_) {
        int size = cfg.n_c > 0 ? cfg.n_c : canonical_size(cl, dom_, pa_, kMaxDefaultNc);
        Vec l(size);
        for (int i = 0; i < size; ++i) l[i] = init(rng);
        cl_logit_.push_back(std::move(l));
    }
    for (int v = 0; v < n; ++v) {
        int rows = 1;
        for (int p : pa_[v]) rows *= dom_[p].size();
        for (int c : cl_of_[v]) rows *= clique_size(c);
        Mat m(rows, dom_[v].size());
        for (int r = 0; r < rows; ++r)
            for (int k = 0; k < dom_[v].size(); ++k) m(r, k) = init(rng);
        resp_logit_.push_back(std::move(m));
    }
}

int Ncm::node_index(const std::string& name) const {
    for (int i = 0; i < n_nodes(); ++i)
        if (names_[i] == name) return i;
    throw ValidationError("unknown model node " + name);
}

std::vector<Variable> Ncm::variables() const {
    std::vector<Variable> out;
    for (int v = 0; v < n_nodes(); ++v) out.push_back(Variable{names_[v], dom_[v]});
    return out;
}

double Ncm::unit_count() const {
    double n = 1;
    for (const auto& l : cl_logit_) n *= static_cast<double>(l.size());
    return n;
}

int Ncm::row(int v, const std::vector<int>& pa_values, const std::vector<int>& u) const {
    int r = 0;
    for (std::size_t i = 0; i < pa_[v].size(); ++i) r = r * dom_[pa_[v][i]].size() + pa_values[i];
    for (int c : cl_of_[v]) r = r * clique_size(c) + u[c];
    return r;
}

int Ncm::n_params() const {
    long n = 0;
    for (const auto& l : cl_logit_) n += l.size();
    for (const auto& m : resp_logit_) n += m.size();
    return static_cast<int>(n);
}

Ncm::Vec Ncm::params() const {
    Vec p(n_params());
    int k = 0;
    for (const auto& l : cl_logit_) {
        p.segment(k, l.size()) = l;
        k += static_cast<int>(l.size());
    }
    for (const auto& m : resp_logit_)
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) p[k++] = m(r, c);
    return p;
}

void Ncm::set_params(const Vec& p) {
    if (p.size() != n_params()) throw ValidationError("parameter vector has the wrong size");
    int k = 0;
    for (auto& l : cl_logit_) {
        l = p.segment(k, l.size());
        k += static_cast<int>(l.size());
    }
    for (auto& m : resp_logit_)
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) m(r, c) = p[k++];
}

namespace {

double safe_log(double p) {
    if (p < 0) throw ValidationError("negative probability");
    return p == 0 ? -std::numeric_limits<double>::infinity() : std::log(p);
}

} // namespace

void Ncm::set_clique_pmf(int c, const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != clique_size(c)) throw ValidationError("clique pmf has the wrong size");
    for (std::size_t i = 0; i < p.size(); ++i) cl_logit_[c][i] = safe_log(p[i]);
}

void Ncm::set_response_row(int v, int row, const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != dom_[v].size()) throw ValidationError("response row has the wrong size");
    for (std::size_t i = 0; i < p.size(); ++i) resp_logit_[v](row, i) = safe_log(p[i]);
}

void Ncm::resize_clique(int c, int n) {
    if (n < 1) throw ValidationError("clique size must be positive");
    int old = clique_size(c);
    cl_logit_[c] = Vec::Zero(n);
    for (int v : cliques_[c]) {
        // rows are (parents, cliques...) mixed radix; rebuild with zeros
        long rows = resp_logit_[v].rows() / old * n;
        resp_logit_[v] = Mat::Zero(rows, dom_[v].size());
    }
}

Ncm build_ncm(const Cdag& g, const std::vector<Domain>& domains, const TrainConfig& cfg) {
    return Ncm(g, domains, cfg);
}

Ncm ncm_from_scm(const Scm& scm, const Cdag* graph) {
    Cdag g = graph ? *graph : induced_diagram(scm);
    std::vector<Domain> dom;
    for (const auto& name : g.nodes()) {
        int v = scm.find_var(name);
        if (v < 0) throw ValidationError("graph node " + name + " is not in the model");
        dom.push_back(scm.var(v).domain);
    }
    if (static_cast<int>(g.nodes().size()) != scm.n_vars()) throw ValidationError("graph must cover every model variable");
    for (int v = 0; v < scm.n_vars(); ++v)
        for (int p : scm.parents(v))
            if (!g.has_directed(scm.var(p).name, scm.var(v).name))
                throw ValidationError("graph lacks the edge " + scm.var(p).name + " -> " + scm.var(v).name);
    Ncm m(g, dom);
    const auto& cliques = m.cliques();

    // exogenous block -> clique
    std::vector<int> home(scm.n_exo(), -1);
    for (int e = 0; e < scm.n_exo(); ++e) {
        std::vector<int> kids;
        for (int v = 0; v < scm.n_vars(); ++v)
            for (int u : scm.exo_parents(v))
                if (u == e) kids.push_back(m.node_index(scm.var(v).name));
        std::sort(kids.begin(), kids.end());
        if (kids.empty()) continue;  // unused block
        for (std::size_t c = 0; c < cliques.size() && home[e] < 0; ++c)
            if (std::includes(cliques[c].begin(), cliques[c].end(), kids.begin(), kids.end())) home[e] = static_cast<int>(c);
        if (home[e] < 0)
            throw ValidationError("exogenous block " + scm.exogenous()[e].name + " feeds variables outside any clique");
    }
    auto radix_u = scm.exo_radix();
    std::vector<std::vector<int>> blocks(cliques.size());
    for (int e = 0; e < scm.n_exo(); ++e)
        if (home[e] >= 0) blocks[home[e]].push_back(e);
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        std::vector<int> r;
        for (int e : blocks[c]) r.push_back(radix_u[e]);
        m.resize_clique(static_cast<int>(c), static_cast<int>(product_size(r)));
        std::vector<double> p;
        std::vector<int> d(r.size(), 0);
        do {
            double q = 1;
            for (std::size_t k = 0; k < d.size(); ++k) q *= scm.exogenous()[blocks[c][k]].pmf[d[k]];
            p.push_back(q);
        } while (next_digits(d, r));
        m.set_clique_pmf(static_cast<int>(c), p);
    }

    // hard response rows
    for (int v = 0; v < m.n_nodes(); ++v) {
        int sv = scm.var_index(m.names()[v]);
        std::vector<int> radix;
        for (int p : m.parents(v)) radix.push_back(m.domain(p).size());
        for (int c : m.cliques_of(v)) radix.push_back(m.clique_size(c));
        std::vector<int> d(radix.size(), 0), u(cliques.size(), 0), su(scm.n_exo(), 0), full(scm.n_vars(), 0);
        std::size_t np = m.parents(v).size();
        do {
            for (std::size_t i = 0; i < np; ++i) full[scm.var_index(m.names()[m.parents(v)[i]])] = d[i];
            for (std::size_t k = 0; k < m.cliques_of(v).size(); ++k) {
                int c = m.cliques_of(v)[k];
                u[c] = d[np + k];
                std::vector<int> r, bd;
                for (int e : blocks[c]) r.push_back(radix_u[e]);
                decode(static_cast<std::size_t>(u[c]), r, bd);
                for (std::size_t t = 0; t < bd.size(); ++t) su[blocks[c][t]] = bd[t];
            }
            // the SCM's parents are a subset of the graph's parents
            int out = scm.apply(sv, full, su);
            std::vector<double> row(m.domain(v).size(), 0.0);
            row[out] = 1.0;
            std::vector<int> pav(d.begin(), d.begin() + np);
            m.set_response_row(v, m.row(v, pav, u), row);
        } while (next_digits(d, radix));
    }
    return m;
}

} // namespace causabs

#include "causabs/clustering.hpp"
#include "causabs/errors.hpp"

namespace causabs {

CausalDiagram latent_project(const CausalDiagram& g, const Names& keep) {
    for (const auto& k : keep)
        if (!g.has_node(k)) throw ValidationError("unknown node " + k);
    CausalDiagram cur = g;
    for (const auto& w : g.nodes()) {
        if (keep.count(w)) continue;
        auto pa = cur.parents(w), ch = cur.children(w), sp = cur.spouses(w);
        Names rest = cur.node_set();
        rest.erase(w);
        CausalDiagram next = cur.induced(rest);
        for (const auto& p : pa)
            for (const auto& c : ch) next.add_directed(p, c);
        for (const auto& a : ch)
            for (const auto& b : ch)
                if (a < b) next.add_bidirected(a, b);
        for (const auto& s : sp)
            for (const auto& c : ch)
                if (s != c) next.add_bidirected(s, c);
        cur = std::move(next);
    }
    return cur;
}

namespace {

CausalDiagram quotient(const CausalDiagram& projected, const InterClustering& inter) {
    CausalDiagram q;
    for (const auto& c : inter.clusters) q.add_node(c.name);
    for (const auto& [a, b] : projected.directed()) {
        int ca = inter.cluster_of(a), cb = inter.cluster_of(b);
        if (ca != cb) q.add_directed(inter.clusters[ca].name, inter.clusters[cb].name);
    }
    for (const auto& [a, b] : projected.bidirected()) {
        int ca = inter.cluster_of(a), cb = inter.cluster_of(b);
        if (ca != cb) q.add_bidirected(inter.clusters[ca].name, inter.clusters[cb].name);
    }
    return q;
}

} // namespace

bool check_admissible(const InterClustering& inter, const CausalDiagram& g) {
    inter.validate();
    return quotient(latent_project(g, inter.members()), inter).is_acyclic();
}

Cdag induce_cdag(const CausalDiagram& g, const InterClustering& inter) {
    inter.validate();
    Cdag q = quotient(latent_project(g, inter.members()), inter);
    if (!q.is_acyclic()) throw ValidationError("clustering is not admissible for the diagram");
    return q;
}

} // namespace causabs

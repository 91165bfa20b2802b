#include <algorithm>
#include <map>

#include "causabs/ncm.hpp"

namespace causabs {

namespace {

using Set = std::vector<int>;  // sorted

Set meet(const Set& a, const Set& b) {
    Set out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Bron–Kerbosch with a pivot of maximal degree in P ∪ X.
void expand(Set r, Set p, Set x, const std::vector<Set>& adj, std::vector<Set>& out) {
    if (p.empty() && x.empty()) {
        std::sort(r.begin(), r.end());
        out.push_back(std::move(r));
        return;
    }
    int pivot = -1;
    std::size_t best = 0;
    for (const Set* s : {&p, &x})
        for (int u : *s) {
            auto k = meet(p, adj[u]).size();
            if (pivot < 0 || k > best) pivot = u, best = k;
        }
    Set cand;
    std::set_difference(p.begin(), p.end(), adj[pivot].begin(), adj[pivot].end(), std::back_inserter(cand));
    for (int v : cand) {
        Set r2 = r;
        r2.push_back(v);
        expand(r2, meet(p, adj[v]), meet(x, adj[v]), adj, out);
        p.erase(std::find(p.begin(), p.end(), v));
        x.insert(std::upper_bound(x.begin(), x.end(), v), v);
    }
}

} // namespace

std::vector<std::vector<int>> bidirected_cliques(const CausalDiagram& g) {
    const auto& nodes = g.nodes();
    std::map<std::string, int> ix;
    for (std::size_t i = 0; i < nodes.size(); ++i) ix[nodes[i]] = static_cast<int>(i);
    std::vector<Set> adj(nodes.size());
    for (const auto& [a, b] : g.bidirected()) {
        adj[ix[a]].push_back(ix[b]);
        adj[ix[b]].push_back(ix[a]);
    }
    for (auto& s : adj) std::sort(s.begin(), s.end());
    Set all(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) all[i] = static_cast<int>(i);
    std::vector<Set> out;
    if (!all.empty()) expand({}, all, {}, adj, out);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace causabs

#include <algorithm>

#include "causabs/clustering.hpp"
#include "causabs/errors.hpp"
#include "causabs/identify.hpp"

namespace causabs {

bool default_id_oracle(const CtfQuery& lifted, const Cdag& cdag) {
    return identify_interventional(cdag, lifted).identifiable;
}

namespace {

bool valid(const InterClustering& c, const CausalDiagram& g, const std::vector<CtfQuery>& queries,
           const IdOracle& oracle) {
    if (c.clusters.empty() || !check_admissible(c, g)) return false;
    Cdag cdag = induce_cdag(g, c);
    for (const auto& q : queries) {
        if (!answerable(q, c)) return false;
        if (!oracle(lift_query_shape(q, c), cdag)) return false;
    }
    return true;
}

InterClustering remove_var(const InterClustering& c, const std::string& v) {
    InterClustering out;
    for (const auto& cl : c.clusters) {
        Cluster n = cl;
        n.members.erase(std::remove(n.members.begin(), n.members.end(), v), n.members.end());
        if (n.members.empty()) continue;
        if (n.members.size() != cl.members.size()) n.name = default_cluster_name(n.members);
        out.clusters.push_back(std::move(n));
    }
    return out;
}

InterClustering merge_pair(const InterClustering& c, int i, int j, const std::vector<std::string>& order) {
    Names s(c.clusters[i].members.begin(), c.clusters[i].members.end());
    s.insert(c.clusters[j].members.begin(), c.clusters[j].members.end());
    std::vector<std::string> m;
    for (const auto& v : order)
        if (s.count(v)) m.push_back(v);
    InterClustering out;
    for (int k = 0; k < c.size(); ++k) {
        if (k == j) continue;
        if (k == i) out.clusters.push_back(Cluster{default_cluster_name(m), m});
        else out.clusters.push_back(c.clusters[k]);
    }
    return out;
}

// Cluster indices sorted by the lexicographically smallest member.
std::vector<int> lexicographic(const InterClustering& c) {
    std::vector<int> ix(c.size());
    for (int i = 0; i < c.size(); ++i) ix[i] = i;
    auto key = [&](int i) { return *std::min_element(c.clusters[i].members.begin(), c.clusters[i].members.end()); };
    std::sort(ix.begin(), ix.end(), [&](int a, int b) { return key(a) < key(b); });
    return ix;
}

} // namespace

ChooseResult choose_clusters(const CausalDiagram& g, const NonCausalGraph& gbar, const std::vector<CtfQuery>& queries,
                             const IdOracle& oracle, const ChooseOptions& opt) {
    ChooseResult res;
    auto vars = g.nodes();
    res.c_min = min_clustering(gbar, g);
    res.c_max = max_answerable_clustering(queries, vars,
                                          opt.project_unqueried ? Unmentioned::Exclude : Unmentioned::Singleton);
    if (!coarser_than(res.c_max, res.c_min)) {
        res.reason = "maximally answerable clustering is not coarser than the minimal one";
        return res;
    }
    if (!valid(res.c_min, g, queries, oracle)) {
        res.reason = "minimal clustering is not valid";
        return res;
    }
    InterClustering c = res.c_min;
    auto max_sets = res.c_max.sets();
    Names in_max = res.c_max.members();
    std::vector<std::string> sorted_vars = vars;
    std::sort(sorted_vars.begin(), sorted_vars.end());

    bool updated = true;
    while (updated) {
        updated = false;
        for (const auto& v : sorted_vars) {
            if (in_max.count(v) || c.cluster_of(v) < 0) continue;
            auto next = remove_var(c, v);
            if (valid(next, g, queries, oracle)) {
                c = std::move(next);
                updated = true;
            }
        }
        bool merged = true;
        while (merged) {
            merged = false;
            auto ix = lexicographic(c);
            for (std::size_t a = 0; a < ix.size() && !merged; ++a)
                for (std::size_t b = a + 1; b < ix.size() && !merged; ++b) {
                    Names s(c.clusters[ix[a]].members.begin(), c.clusters[ix[a]].members.end());
                    s.insert(c.clusters[ix[b]].members.begin(), c.clusters[ix[b]].members.end());
                    bool inside = std::any_of(max_sets.begin(), max_sets.end(), [&](const Names& m) {
                        return std::includes(m.begin(), m.end(), s.begin(), s.end());
                    });
                    if (!inside) continue;
                    auto next = merge_pair(c, std::min(ix[a], ix[b]), std::max(ix[a], ix[b]), vars);
                    if (valid(next, g, queries, oracle)) {
                        c = std::move(next);
                        merged = updated = true;
                    }
                }
        }
    }
    res.clusters = c;
    return res;
}

ConditionReport check_conditions(const InterClustering& inter, const CausalDiagram& g, const NonCausalGraph& gbar,
                                 const std::vector<CtfQuery>& queries, const IdOracle& oracle) {
    ConditionReport r;
    r.c1 = true;
    for (const auto& [a, b] : gbar.edges()) {
        int ca = inter.cluster_of(a), cb = inter.cluster_of(b);
        if ((ca >= 0 || cb >= 0) && ca != cb) r.c1 = false;
    }
    r.c2 = check_admissible(inter, g);
    r.c3 = std::all_of(queries.begin(), queries.end(), [&](const CtfQuery& q) { return answerable(q, inter); });
    if (r.c2 && r.c3) {
        Cdag cdag = induce_cdag(g, inter);
        r.c4 = std::all_of(queries.begin(), queries.end(),
                           [&](const CtfQuery& q) { return oracle(lift_query_shape(q, inter), cdag); });
    }
    return r;
}

} // namespace causabs

#include <algorithm>
#include <map>

#include "causabs/clustering.hpp"
#include "causabs/errors.hpp"

namespace causabs {

int InterClustering::cluster_of(const std::string& var) const {
    for (int i = 0; i < size(); ++i)
        for (const auto& m : clusters[i].members)
            if (m == var) return i;
    return -1;
}

int InterClustering::find(const std::string& cluster_name) const {
    for (int i = 0; i < size(); ++i)
        if (clusters[i].name == cluster_name) return i;
    return -1;
}

Names InterClustering::members() const {
    Names out;
    for (const auto& c : clusters) out.insert(c.members.begin(), c.members.end());
    return out;
}

std::vector<Names> InterClustering::sets() const {
    std::vector<Names> out;
    for (const auto& c : clusters) out.emplace_back(c.members.begin(), c.members.end());
    return out;
}

void InterClustering::validate() const {
    Names seen, names;
    for (const auto& c : clusters) {
        if (c.name.empty()) throw ValidationError("cluster without a name");
        if (!names.insert(c.name).second) throw ValidationError("duplicate cluster name " + c.name);
        if (c.members.empty()) throw ValidationError("cluster " + c.name + " is empty");
        for (const auto& m : c.members)
            if (!seen.insert(m).second) throw ValidationError("variable " + m + " is in two clusters");
    }
}

InterClustering singleton_clustering(const std::vector<std::string>& vars) {
    InterClustering c;
    for (const auto& v : vars) c.clusters.push_back(Cluster{v, {v}});
    return c;
}

std::string default_cluster_name(const std::vector<std::string>& members) {
    std::string s;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) s += "+";
        s += members[i];
    }
    return s;
}

bool same_partition(const InterClustering& a, const InterClustering& b) {
    auto sa = a.sets(), sb = b.sets();
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return sa == sb;
}

namespace {

// Members ordered like `order`, unknown members last in name order.
std::vector<std::string> ordered_members(const Names& s, const std::vector<std::string>& order) {
    std::vector<std::string> out;
    for (const auto& v : order)
        if (s.count(v)) out.push_back(v);
    for (const auto& v : s)
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
}

InterClustering from_sets(const std::vector<Names>& sets, const std::vector<std::string>& order) {
    InterClustering c;
    for (const auto& s : sets) {
        auto m = ordered_members(s, order);
        c.clusters.push_back(Cluster{default_cluster_name(m), m});
    }
    return c;
}

} // namespace

InterClustering merge_cycles(const InterClustering& inter, const CausalDiagram& g) {
    inter.validate();
    auto proj = latent_project(g, inter.members());
    int n = inter.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) reach[i][i] = true;
    for (const auto& [a, b] : proj.directed()) reach[inter.cluster_of(a)][inter.cluster_of(b)] = true;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    std::vector<int> group(n, -1);
    std::vector<Names> sets;
    bool merged = false;
    for (int i = 0; i < n; ++i) {
        if (group[i] >= 0) continue;
        group[i] = static_cast<int>(sets.size());
        Names s(inter.clusters[i].members.begin(), inter.clusters[i].members.end());
        for (int j = i + 1; j < n; ++j)
            if (group[j] < 0 && reach[i][j] && reach[j][i]) {
                group[j] = group[i];
                s.insert(inter.clusters[j].members.begin(), inter.clusters[j].members.end());
                merged = true;
            }
        sets.push_back(std::move(s));
    }
    if (!merged) return inter;
    InterClustering out;
    for (int i = 0; i < n; ++i) {
        int gi = group[i];
        bool first = true;
        for (int j = 0; j < i; ++j) first = first && group[j] != gi;
        if (!first) continue;
        bool single = std::count(group.begin(), group.end(), gi) == 1;
        if (single) {
            out.clusters.push_back(inter.clusters[i]);
        } else {
            auto m = ordered_members(sets[gi], g.nodes());
            out.clusters.push_back(Cluster{default_cluster_name(m), m});
        }
    }
    return out;
}

InterClustering min_clustering(const NonCausalGraph& gbar, const CausalDiagram& g) {
    NonCausalGraph all = gbar;
    for (const auto& n : g.nodes()) all.add_node(n);
    return merge_cycles(from_sets(all.components(), g.nodes()), g);
}

namespace {

void term_sets(const std::vector<Term>& terms, std::vector<Names>& out) {
    for (const auto& t : terms) {
        Names y, x;
        for (const auto& s : t.outcome) y.insert(s.first);
        for (const auto& s : t.intervention) x.insert(s.first);
        if (!y.empty()) out.push_back(std::move(y));
        if (!x.empty()) out.push_back(std::move(x));
    }
}

std::vector<Names> query_sets(const CtfQuery& q) {
    std::vector<Names> out;
    term_sets(q.terms, out);
    term_sets(q.given, out);
    return out;
}

} // namespace

InterClustering max_answerable_clustering(const std::vector<CtfQuery>& queries,
                                          const std::vector<std::string>& all_vars, Unmentioned policy) {
    std::vector<Names> sets;
    for (const auto& q : queries)
        for (auto& s : query_sets(q)) sets.push_back(std::move(s));
    std::vector<std::string> order = all_vars;
    for (const auto& s : sets)
        for (const auto& v : s)
            if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    std::map<std::vector<int>, Names> cells;
    std::vector<std::vector<int>> first_seen;
    for (const auto& v : order) {
        std::vector<int> sig;
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (sets[i].count(v)) sig.push_back(static_cast<int>(i));
        if (sig.empty()) {
            if (policy == Unmentioned::Exclude) continue;
            sig.push_back(-1 - static_cast<int>(first_seen.size()));  // unique per variable
        }
        if (!cells.count(sig)) first_seen.push_back(sig);
        cells[sig].insert(v);
    }
    std::vector<Names> out;
    for (const auto& sig : first_seen) out.push_back(cells[sig]);
    return from_sets(out, order);
}

bool coarser_than(const InterClustering& a, const InterClustering& b) {
    Names covered = a.members();
    auto as = a.sets();
    for (const auto& cb : b.sets()) {
        bool touches = std::any_of(cb.begin(), cb.end(), [&](const std::string& v) { return covered.count(v) > 0; });
        if (!touches) continue;
        bool inside = std::any_of(as.begin(), as.end(), [&](const Names& ca) {
            return std::includes(ca.begin(), ca.end(), cb.begin(), cb.end());
        });
        if (!inside) return false;
    }
    return true;
}

bool answerable(const CtfQuery& q, const InterClustering& inter) {
    auto sets = inter.sets();
    for (const auto& s : query_sets(q))
        for (const auto& v : s) {
            int c = inter.cluster_of(v);
            if (c < 0) return false;
            if (!std::includes(s.begin(), s.end(), sets[c].begin(), sets[c].end())) return false;
        }
    return true;
}

namespace {

std::vector<Setting> lift_settings(const std::vector<Setting>& in, const InterClustering& inter) {
    std::vector<Setting> out;
    for (const auto& [v, _] : in) {
        int c = inter.cluster_of(v);
        if (c < 0) throw ValidationError("variable " + v + " is not clustered");
        const auto& name = inter.clusters[c].name;
        bool dup = std::any_of(out.begin(), out.end(), [&](const Setting& s) { return s.first == name; });
        if (!dup) out.emplace_back(name, "*");
    }
    return out;
}

std::vector<Term> lift_terms(const std::vector<Term>& in, const InterClustering& inter) {
    std::vector<Term> out;
    for (const auto& t : in) out.push_back(Term{lift_settings(t.outcome, inter), lift_settings(t.intervention, inter)});
    return out;
}

} // namespace

CtfQuery lift_query_shape(const CtfQuery& q, const InterClustering& inter) {
    if (!answerable(q, inter)) throw ValidationError("query " + print_query(q) + " is not a union of clusters");
    return CtfQuery{lift_terms(q.terms, inter), lift_terms(q.given, inter)};
}

} // namespace causabs

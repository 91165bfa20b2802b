#include "causabs/diagram.hpp"

#include <algorithm>
#include <map>

#include "causabs/errors.hpp"

namespace causabs {

namespace {

Edge ordered(const std::string& a, const std::string& b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::vector<Names> union_find_components(const std::vector<std::string>& nodes, const std::set<Edge>& edges) {
    std::map<std::string, std::string> parent;
    for (const auto& n : nodes) parent[n] = n;
    auto find = [&](std::string x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [a, b] : edges) {
        auto ra = find(a), rb = find(b);
        if (ra != rb) parent[ra] = rb;
    }
    std::vector<Names> out;
    std::map<std::string, std::size_t> slot;
    for (const auto& n : nodes) {
        auto r = find(n);
        auto it = slot.find(r);
        if (it == slot.end()) {
            slot[r] = out.size();
            out.push_back({n});
        } else {
            out[it->second].insert(n);
        }
    }
    return out;
}

} // namespace

CausalDiagram::CausalDiagram(std::vector<std::string> nodes) {
    for (auto& n : nodes) add_node(n);
}

void CausalDiagram::add_node(const std::string& n) {
    if (n.empty()) throw ValidationError("empty node name");
    if (!has_node(n)) nodes_.push_back(n);
}

bool CausalDiagram::has_node(const std::string& n) const {
    return std::find(nodes_.begin(), nodes_.end(), n) != nodes_.end();
}

void CausalDiagram::add_directed(const std::string& from, const std::string& to) {
    if (from == to) throw ValidationError("self loop on " + from);
    if (!has_node(from) || !has_node(to)) throw ValidationError("edge " + from + "->" + to + " uses unknown node");
    dir_.emplace(from, to);
}

void CausalDiagram::add_bidirected(const std::string& a, const std::string& b) {
    if (a == b) throw ValidationError("self loop on " + a);
    if (!has_node(a) || !has_node(b)) throw ValidationError("edge " + a + "<->" + b + " uses unknown node");
    bi_.insert(ordered(a, b));
}

bool CausalDiagram::has_directed(const std::string& a, const std::string& b) const { return dir_.count({a, b}) > 0; }

bool CausalDiagram::has_bidirected(const std::string& a, const std::string& b) const {
    return bi_.count(ordered(a, b)) > 0;
}

Names CausalDiagram::parents(const std::string& n) const {
    Names out;
    for (const auto& [a, b] : dir_)
        if (b == n) out.insert(a);
    return out;
}

Names CausalDiagram::children(const std::string& n) const {
    Names out;
    for (const auto& [a, b] : dir_)
        if (a == n) out.insert(b);
    return out;
}

Names CausalDiagram::spouses(const std::string& n) const {
    Names out;
    for (const auto& [a, b] : bi_) {
        if (a == n) out.insert(b);
        if (b == n) out.insert(a);
    }
    return out;
}

Names CausalDiagram::ancestors(const Names& of) const {
    Names out = of;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [a, b] : dir_)
            if (out.count(b) && out.insert(a).second) grew = true;
    }
    return out;
}

Names CausalDiagram::descendants(const Names& of) const {
    Names out = of;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [a, b] : dir_)
            if (out.count(a) && out.insert(b).second) grew = true;
    }
    return out;
}

std::vector<std::string> CausalDiagram::topological_order() const {
    std::map<std::string, int> indeg;
    for (const auto& n : nodes_) indeg[n] = 0;
    for (const auto& e : dir_) ++indeg[e.second];
    std::vector<std::string> out;
    Names done;
    while (out.size() < nodes_.size()) {
        const std::string* pick = nullptr;
        for (const auto& n : nodes_)
            if (!done.count(n) && indeg[n] == 0) {
                pick = &n;
                break;
            }
        if (!pick) throw ValidationError("directed part has a cycle");
        done.insert(*pick);
        out.push_back(*pick);
        for (const auto& [a, b] : dir_)
            if (a == *pick) --indeg[b];
    }
    return out;
}

bool CausalDiagram::is_acyclic() const {
    try {
        topological_order();
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

CausalDiagram CausalDiagram::induced(const Names& keep) const {
    CausalDiagram g;
    for (const auto& n : nodes_)
        if (keep.count(n)) g.nodes_.push_back(n);
    for (const auto& e : dir_)
        if (keep.count(e.first) && keep.count(e.second)) g.dir_.insert(e);
    for (const auto& e : bi_)
        if (keep.count(e.first) && keep.count(e.second)) g.bi_.insert(e);
    return g;
}

CausalDiagram CausalDiagram::cut_incoming(const Names& targets) const {
    CausalDiagram g;
    g.nodes_ = nodes_;
    for (const auto& e : dir_)
        if (!targets.count(e.second)) g.dir_.insert(e);
    for (const auto& e : bi_)
        if (!targets.count(e.first) && !targets.count(e.second)) g.bi_.insert(e);
    return g;
}

std::vector<Names> CausalDiagram::c_components() const { return union_find_components(nodes_, bi_); }

bool CausalDiagram::operator==(const CausalDiagram& o) const {
    return node_set() == o.node_set() && dir_ == o.dir_ && bi_ == o.bi_;
}

void NonCausalGraph::add_node(const std::string& n) {
    if (std::find(nodes_.begin(), nodes_.end(), n) == nodes_.end()) nodes_.push_back(n);
}

void NonCausalGraph::add_edge(const std::string& a, const std::string& b) {
    if (a == b) throw ValidationError("self loop on " + a);
    if (std::find(nodes_.begin(), nodes_.end(), a) == nodes_.end() ||
        std::find(nodes_.begin(), nodes_.end(), b) == nodes_.end())
        throw ValidationError("noncausal edge uses unknown node");
    edges_.insert(ordered(a, b));
}

std::vector<Names> NonCausalGraph::components() const { return union_find_components(nodes_, edges_); }

} // namespace causabs

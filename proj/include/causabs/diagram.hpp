#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace causabs {

using Names = std::set<std::string>;
using Edge = std::pair<std::string, std::string>;

// Directed plus bidirected edges over named nodes. Node order is insertion order.
class CausalDiagram {
public:
    CausalDiagram() = default;
    explicit CausalDiagram(std::vector<std::string> nodes);

    void add_node(const std::string& n);
    void add_directed(const std::string& from, const std::string& to);
    void add_bidirected(const std::string& a, const std::string& b);

    const std::vector<std::string>& nodes() const { return nodes_; }
    Names node_set() const { return Names(nodes_.begin(), nodes_.end()); }
    bool has_node(const std::string& n) const;
    const std::set<Edge>& directed() const { return dir_; }
    const std::set<Edge>& bidirected() const { return bi_; }  // stored with first < second
    bool has_directed(const std::string& a, const std::string& b) const;
    bool has_bidirected(const std::string& a, const std::string& b) const;

    Names parents(const std::string& n) const;
    Names children(const std::string& n) const;
    Names spouses(const std::string& n) const;
    Names ancestors(const Names& of) const;    // includes `of`
    Names descendants(const Names& of) const;  // includes `of`
    bool is_acyclic() const;
    // Kahn order, ties broken by insertion order. Throws on cycles.
    std::vector<std::string> topological_order() const;

    CausalDiagram induced(const Names& keep) const;
    // Drops edges into `targets` (directed and bidirected).
    CausalDiagram cut_incoming(const Names& targets) const;
    // Connected components of the bidirected part.
    std::vector<Names> c_components() const;

    bool operator==(const CausalDiagram& o) const;

private:
    std::vector<std::string> nodes_;
    std::set<Edge> dir_, bi_;
};

using Cdag = CausalDiagram;

class NonCausalGraph {
public:
    NonCausalGraph() = default;
    explicit NonCausalGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {}
    void add_node(const std::string& n);
    void add_edge(const std::string& a, const std::string& b);
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::set<Edge>& edges() const { return edges_; }
    std::vector<Names> components() const;

private:
    std::vector<std::string> nodes_;
    std::set<Edge> edges_;
};

} // namespace causabs

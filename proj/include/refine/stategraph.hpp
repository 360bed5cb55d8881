#pragma once

// Graph-based memory model: roots are scopes, nodes are objects, leaves are
// primitive values. Graphs are immutable values; every mutation returns a new
// graph.

#include "refine/lang.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace refine
{

enum class VertexKind
{
    Undef,
    Root,
    Node,
    Leaf
};

/// A vertex of a state graph. Roots, nodes and leaves carry a graph-unique id;
/// two leaves holding the same value are still distinct vertices.
struct Vertex
{
    VertexKind kind = VertexKind::Undef;
    std::int64_t id = 0;
    Label cls;               // runtime class of a node
    std::int64_t value = 0;  // payload of a leaf

    static Vertex undef() { return {}; }
    static Vertex root(std::int64_t id) { return {VertexKind::Root, id, {}, 0}; }
    static Vertex node(std::int64_t id, Label cls) { return {VertexKind::Node, id, std::move(cls), 0}; }
    static Vertex leaf(std::int64_t id, std::int64_t value) { return {VertexKind::Leaf, id, {}, value}; }

    bool is_undef() const { return kind == VertexKind::Undef; }
    bool is_root() const { return kind == VertexKind::Root; }
    bool is_node() const { return kind == VertexKind::Node; }
    bool is_leaf() const { return kind == VertexKind::Leaf; }

    bool operator==(const Vertex&) const = default;
};

std::string to_string(const Vertex& v);

class GraphError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

class StateGraph
{
public:
    using EdgeKey = std::pair<std::pair<VertexKind, std::int64_t>, Label>;

    /// A graph with a single root and no edges. Not well-formed until the root
    /// receives an outgoing edge.
    static StateGraph with_root();

    /// Target of the edge (v, l); Undef when absent. Undef has no outgoing
    /// edges by construction.
    Vertex edge(const Vertex& v, const Label& l) const;

    /// Outgoing edges of v sorted by label.
    std::vector<std::pair<Label, Vertex>> out_edges(const Vertex& v) const;

    const std::vector<Vertex>& roots() const { return roots_; }
    const Vertex& head() const { return roots_.front(); }
    const std::map<EdgeKey, Vertex>& edges() const { return edges_; }
    std::int64_t next_id() const { return next_id_; }

    // Raw construction primitives. They enforce the structural constraints
    // (no edges out of Undef or leaves, no edges into roots) but not wfGraph.
    StateGraph set_edge(const Vertex& src, const Label& l, const Vertex& dst) const;
    StateGraph erase_edge(const Vertex& src, const Label& l) const;
    std::pair<Vertex, StateGraph> fresh_node(const Label& cls) const;
    std::pair<Vertex, StateGraph> fresh_leaf(std::int64_t value) const;
    std::pair<Vertex, StateGraph> push_root() const;
    StateGraph pop_root() const;

private:
    std::map<EdgeKey, Vertex> edges_;
    std::vector<Vertex> roots_;
    std::int64_t next_id_ = 0;
};

/// edges(Undef, l) = Undef for every l.
bool is_good_function(const StateGraph& g);
/// isGoodFunction, unique roots, no incoming edge on a root, every root has
/// an outgoing edge, no outgoing edge from a leaf.
bool wf_graph(const StateGraph& g);

/// Resolves p from the current scope. The head label is looked up through the
/// scope chain (innermost root first); the empty path is the current root.
Vertex get_vertex_path(const Path& p, const StateGraph& g);

/// Vertex owning the final edge of p: the resolved owner path, or for a
/// single-label path the root where the label is bound (the current root if
/// it is bound nowhere).
Vertex owner_vertex(const Path& p, const StateGraph& g);

/// True iff exactly one proper prefix of p resolves to p's owner.
bool is_good_path(const Path& p, const StateGraph& g);
bool wf_path(const Path& p, const StateGraph& g);

/// Redirects the final edge of p to n.
StateGraph swing_path(const Path& p, const Vertex& n, const StateGraph& g);

/// Pushes a new scope root with one edge per binding.
StateGraph vars(const std::vector<std::pair<Label, Vertex>>& bindings, const StateGraph& g);

/// Pops the current scope root and its outgoing edges.
StateGraph remove_snode(const StateGraph& g);

std::pair<Vertex, StateGraph> add_object(const Label& cls, const std::vector<std::pair<Label, Vertex>>& fields,
                                         const StateGraph& g);

bool alias(const Path& p1, const Path& p2, const StateGraph& g);

/// Debug dump: roots head-first, then one `src -label-> dst` line per edge.
std::string dump(const StateGraph& g);

/// Canonical form of the part of g reachable from its roots. Nodes and leaves
/// are renamed in discovery order, so two graphs get the same fingerprint iff
/// they agree on navigation, leaf values and aliasing (of leaves too).
std::string fingerprint(const StateGraph& g);

/// Every path of at most max_len labels drawn from `labels`, shortest first.
std::vector<Path> all_paths(const std::vector<Label>& labels, std::size_t max_len);

/// Same resolution verdict (Undef / leaf value / same node up to renaming) for
/// every path of bounded length.
bool resolution_equivalent(const StateGraph& a, const StateGraph& b, const std::vector<Label>& labels,
                           std::size_t max_len);

} // namespace refine

#include "refine/stategraph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace refine
{

namespace
{

StateGraph::EdgeKey key_of(const Vertex& v, const Label& l) { return {{v.kind, v.id}, l}; }

} // namespace

std::string to_string(const Vertex& v)
{
    switch (v.kind)
    {
    case VertexKind::Undef:
        return "undef";
    case VertexKind::Root:
        return "r" + std::to_string(v.id);
    case VertexKind::Node:
        return "n" + std::to_string(v.id) + ":" + v.cls;
    case VertexKind::Leaf:
        return "l" + std::to_string(v.id) + "=" + std::to_string(v.value);
    }
    return "?";
}

StateGraph StateGraph::with_root()
{
    StateGraph g;
    g.roots_.push_back(Vertex::root(g.next_id_++));
    return g;
}

Vertex StateGraph::edge(const Vertex& v, const Label& l) const
{
    if (v.is_undef())
        return Vertex::undef();
    auto it = edges_.find(key_of(v, l));
    return it == edges_.end() ? Vertex::undef() : it->second;
}

std::vector<std::pair<Label, Vertex>> StateGraph::out_edges(const Vertex& v) const
{
    std::vector<std::pair<Label, Vertex>> out;
    const std::pair<VertexKind, std::int64_t> src{v.kind, v.id};
    for (auto it = edges_.lower_bound({src, Label{}}); it != edges_.end() && it->first.first == src; ++it)
        out.emplace_back(it->first.second, it->second);
    return out;
}

StateGraph StateGraph::set_edge(const Vertex& src, const Label& l, const Vertex& dst) const
{
    if (src.is_undef())
        throw GraphError("edge from the undefined vertex");
    if (src.is_leaf())
        throw GraphError("edge from leaf " + to_string(src));
    if (dst.is_root())
        throw GraphError("edge into root " + to_string(dst));
    if (dst.is_undef())
        return erase_edge(src, l);
    StateGraph g = *this;
    g.edges_[key_of(src, l)] = dst;
    return g;
}

StateGraph StateGraph::erase_edge(const Vertex& src, const Label& l) const
{
    StateGraph g = *this;
    g.edges_.erase(key_of(src, l));
    return g;
}

std::pair<Vertex, StateGraph> StateGraph::fresh_node(const Label& cls) const
{
    StateGraph g = *this;
    Vertex v = Vertex::node(g.next_id_++, cls);
    return {v, std::move(g)};
}

std::pair<Vertex, StateGraph> StateGraph::fresh_leaf(std::int64_t value) const
{
    StateGraph g = *this;
    Vertex v = Vertex::leaf(g.next_id_++, value);
    return {v, std::move(g)};
}

std::pair<Vertex, StateGraph> StateGraph::push_root() const
{
    StateGraph g = *this;
    Vertex r = Vertex::root(g.next_id_++);
    g.roots_.insert(g.roots_.begin(), r);
    return {r, std::move(g)};
}

StateGraph StateGraph::pop_root() const
{
    if (roots_.size() < 2)
        throw GraphError("cannot remove the last scope root");
    StateGraph g = *this;
    const Vertex top = g.roots_.front();
    for (const auto& [label, dst] : out_edges(top))
        g.edges_.erase(key_of(top, label));
    g.roots_.erase(g.roots_.begin());
    return g;
}

bool is_good_function(const StateGraph& g)
{
    return std::none_of(g.edges().begin(), g.edges().end(),
                        [](const auto& e) { return e.first.first.first == VertexKind::Undef; });
}

bool wf_graph(const StateGraph& g)
{
    if (!is_good_function(g) || g.roots().empty())
        return false;
    std::set<std::int64_t> ids;
    for (const auto& r : g.roots())
    {
        if (!r.is_root() || !ids.insert(r.id).second)
            return false;
        if (g.out_edges(r).empty())
            return false;
    }
    for (const auto& [key, dst] : g.edges())
    {
        if (dst.is_root() || dst.is_undef())
            return false;
        if (key.first.first == VertexKind::Leaf)
            return false;
    }
    return true;
}

Vertex get_vertex_path(const Path& p, const StateGraph& g)
{
    if (p.empty())
        return g.head();
    Vertex v = Vertex::undef();
    for (const auto& r : g.roots())
    {
        v = g.edge(r, p.head());
        if (!v.is_undef())
            break;
    }
    for (auto it = p.labels.rbegin() + 1; it != p.labels.rend() && !v.is_undef(); ++it)
        v = g.edge(v, *it);
    return v;
}

Vertex owner_vertex(const Path& p, const StateGraph& g)
{
    if (p.empty())
        return Vertex::undef();
    if (p.size() == 1)
    {
        for (const auto& r : g.roots())
            if (!g.edge(r, p.head()).is_undef())
                return r;
        return g.head();
    }
    return get_vertex_path(p.owner(), g);
}

bool is_good_path(const Path& p, const StateGraph& g)
{
    if (p.size() <= 1)
        return true;
    const Vertex owner = get_vertex_path(p.owner(), g);
    int hits = 0;
    for (std::size_t len = 1; len < p.size(); ++len)
        if (get_vertex_path(p.prefix(len), g) == owner)
            ++hits;
    return hits == 1;
}

bool wf_path(const Path& p, const StateGraph& g)
{
    return !p.empty() && !get_vertex_path(p, g).is_undef() && is_good_path(p, g);
}

StateGraph swing_path(const Path& p, const Vertex& n, const StateGraph& g)
{
    if (p.empty())
        throw GraphError("cannot swing the empty path");
    if (n.is_root())
        throw GraphError("cannot swing " + to_string(p) + " to a root");
    if (n.is_undef())
        throw GraphError("cannot swing " + to_string(p) + " to the undefined vertex");
    const Vertex owner = owner_vertex(p, g);
    if (owner.is_undef())
        throw GraphError("owner of " + to_string(p) + " does not resolve");
    if (owner.is_leaf())
        throw GraphError("owner of " + to_string(p) + " is a leaf");
    return g.set_edge(owner, p.last(), n);
}

StateGraph vars(const std::vector<std::pair<Label, Vertex>>& bindings, const StateGraph& g)
{
    if (bindings.empty())
        throw GraphError("a scope needs at least one variable");
    auto [root, out] = g.push_root();
    std::set<Label> seen;
    for (const auto& [label, v] : bindings)
    {
        if (!seen.insert(label).second)
            throw GraphError("duplicate variable '" + label + "'");
        if (v.is_root() || v.is_undef())
            throw GraphError("variable '" + label + "' must be bound to a node or leaf");
        out = out.set_edge(root, label, v);
    }
    return out;
}

StateGraph remove_snode(const StateGraph& g) { return g.pop_root(); }

std::pair<Vertex, StateGraph> add_object(const Label& cls, const std::vector<std::pair<Label, Vertex>>& fields,
                                         const StateGraph& g)
{
    auto [node, out] = g.fresh_node(cls);
    std::set<Label> seen;
    for (const auto& [label, v] : fields)
    {
        if (!seen.insert(label).second)
            throw GraphError("duplicate field '" + label + "'");
        out = out.set_edge(node, label, v);
    }
    return {node, out};
}

bool alias(const Path& p1, const Path& p2, const StateGraph& g)
{
    const Vertex a = get_vertex_path(p1, g);
    return !a.is_undef() && a == get_vertex_path(p2, g);
}

std::string dump(const StateGraph& g)
{
    std::ostringstream os;
    os << "roots:";
    for (const auto& r : g.roots())
        os << ' ' << to_string(r);
    os << '\n';

    // Sources are stored by (kind, id); recover node classes from edge targets.
    std::map<std::pair<VertexKind, std::int64_t>, Vertex> known;
    for (const auto& r : g.roots())
        known[{r.kind, r.id}] = r;
    for (const auto& [key, dst] : g.edges())
        known[{dst.kind, dst.id}] = dst;

    auto source = [&](const std::pair<VertexKind, std::int64_t>& k) {
        auto it = known.find(k);
        return it != known.end() ? to_string(it->second) : "n" + std::to_string(k.second);
    };
    for (const auto& r : g.roots())
        for (const auto& [label, dst] : g.out_edges(r))
            os << to_string(r) << " -" << label << "-> " << to_string(dst) << '\n';
    for (const auto& [key, dst] : g.edges())
        if (key.first.first != VertexKind::Root)
            os << source(key.first) << " -" << key.second << "-> " << to_string(dst) << '\n';
    return os.str();
}

std::string fingerprint(const StateGraph& g)
{
    std::map<std::int64_t, std::size_t> node_index;
    std::map<std::int64_t, std::size_t> leaf_index;
    std::deque<Vertex> queue;
    std::ostringstream os;

    auto name = [&](const Vertex& v) -> std::string {
        switch (v.kind)
        {
        case VertexKind::Leaf:
        {
            auto it = leaf_index.emplace(v.id, leaf_index.size()).first;
            return "L" + std::to_string(it->second) + "=" + std::to_string(v.value);
        }
        case VertexKind::Node:
        {
            auto [it, fresh] = node_index.emplace(v.id, node_index.size());
            if (fresh)
                queue.push_back(v);
            return "N" + std::to_string(it->second);
        }
        default:
            return "?";
        }
    };

    for (std::size_t i = 0; i < g.roots().size(); ++i)
    {
        os << "R" << i << '{';
        for (const auto& [label, dst] : g.out_edges(g.roots()[i]))
            os << label << ':' << name(dst) << ';';
        os << '}';
    }
    while (!queue.empty())
    {
        const Vertex v = queue.front();
        queue.pop_front();
        os << 'N' << node_index.at(v.id) << ':' << v.cls << '{';
        for (const auto& [label, dst] : g.out_edges(v))
            os << label << ':' << name(dst) << ';';
        os << '}';
    }
    return os.str();
}

std::vector<Path> all_paths(const std::vector<Label>& labels, std::size_t max_len)
{
    std::vector<Path> out;
    std::vector<Path> layer{Path{}};
    for (std::size_t len = 1; len <= max_len; ++len)
    {
        std::vector<Path> next;
        for (const auto& p : layer)
            for (const auto& l : labels)
                next.push_back(p.extend(l));
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

bool resolution_equivalent(const StateGraph& a, const StateGraph& b, const std::vector<Label>& labels,
                           std::size_t max_len)
{
    if (a.roots().size() != b.roots().size())
        return false;
    // Node renaming must be consistent across all paths.
    std::map<std::int64_t, std::int64_t> fwd;
    std::map<std::int64_t, std::int64_t> back;
    for (const auto& p : all_paths(labels, max_len))
    {
        const Vertex va = get_vertex_path(p, a);
        const Vertex vb = get_vertex_path(p, b);
        if (va.kind != vb.kind)
            return false;
        if (va.is_leaf() && va.value != vb.value)
            return false;
        if (va.is_node())
        {
            if (va.cls != vb.cls)
                return false;
            auto [it, fresh] = fwd.emplace(va.id, vb.id);
            auto [it2, fresh2] = back.emplace(vb.id, va.id);
            if (it->second != vb.id || it2->second != va.id)
                return false;
        }
    }
    return true;
}

} // namespace refine

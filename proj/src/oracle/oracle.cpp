#include "refine/oracle.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace refine
{

SemanticsConfig OracleBounds::semantics() const
{
    SemanticsConfig cfg;
    cfg.values = values;
    cfg.unroll_limit = unroll_limit;
    return cfg;
}

OracleBounds derive_bounds(const std::vector<Design>& designs, OracleBounds base)
{
    for (const auto& d : designs)
        collect_labels(d, base.var_labels, base.field_labels);
    return base;
}

std::string to_string(Verdict::Kind k)
{
    switch (k)
    {
    case Verdict::Kind::Holds:
        return "holds";
    case Verdict::Kind::Counterexample:
        return "counterexample";
    case Verdict::Kind::Unknown:
        return "unknown";
    }
    return "?";
}

namespace
{

// Canonical generation: vertices are completed in discovery order (root, then
// nodes in the order their first incoming edge was assigned), and a slot can
// point at an already discovered node or at the next fresh one. Every graph
// is therefore produced once per renaming class. Leaves are either fresh or
// shared with an earlier slot.
struct Generator
{
    const OracleBounds& b;
    std::vector<std::vector<StateGraph>> by_nodes;
    std::size_t produced = 0;
    bool truncated = false;

    struct Partial
    {
        StateGraph g;
        std::vector<Vertex> nodes; // discovered so far
        std::vector<Vertex> leaves;
        std::size_t done = 0;      // vertices (root = 0) whose slots are assigned
    };

    void run()
    {
        by_nodes.assign(static_cast<std::size_t>(std::max(b.max_nodes, 0)) + 1, {});
        if (b.var_labels.empty())
            return;
        Partial p{StateGraph::with_root(), {}, {}, 0};
        fill_vertex(p);
    }

    const std::vector<Label>& labels_of(std::size_t vertex) const
    {
        return vertex == 0 ? b.var_labels : b.field_labels;
    }

    Vertex vertex_at(const Partial& p, std::size_t index) const
    {
        return index == 0 ? p.g.head() : p.nodes[index - 1];
    }

    void fill_vertex(const Partial& p)
    {
        if (truncated)
            return;
        if (p.done == p.nodes.size() + 1)
        {
            if (wf_graph(p.g))
            {
                by_nodes[p.nodes.size()].push_back(p.g);
                if (++produced > b.max_graphs)
                    truncated = true;
            }
            return;
        }
        fill_slot(p, 0);
    }

    void fill_slot(const Partial& p, std::size_t slot)
    {
        if (truncated)
            return;
        const auto& labels = labels_of(p.done);
        if (slot == labels.size())
        {
            Partial next = p;
            ++next.done;
            fill_vertex(next);
            return;
        }
        const Vertex src = vertex_at(p, p.done);
        const Label& l = labels[slot];

        fill_slot(p, slot + 1); // absent

        for (const auto& leaf : p.leaves)
        {
            Partial next = p;
            next.g = next.g.set_edge(src, l, leaf);
            fill_slot(next, slot + 1);
        }
        for (auto v : b.values)
        {
            Partial next = p;
            Vertex leaf;
            std::tie(leaf, next.g) = next.g.fresh_leaf(v);
            next.leaves.push_back(leaf);
            next.g = next.g.set_edge(src, l, leaf);
            fill_slot(next, slot + 1);
        }
        for (const auto& n : p.nodes)
        {
            Partial next = p;
            next.g = next.g.set_edge(src, l, n);
            fill_slot(next, slot + 1);
        }
        if (static_cast<int>(p.nodes.size()) < b.max_nodes)
        {
            Partial next = p;
            Vertex n;
            std::tie(n, next.g) = next.g.fresh_node(b.node_class);
            next.nodes.push_back(n);
            next.g = next.g.set_edge(src, l, n);
            fill_slot(next, slot + 1);
        }
    }
};

} // namespace

Enumeration enumerate_graphs(const OracleBounds& b)
{
    Generator gen{b, {}, 0, false};
    gen.run();
    Enumeration out;
    out.truncated = gen.truncated;
    std::set<std::string> seen;
    for (auto& layer : gen.by_nodes)
        for (auto& g : layer)
            if (seen.insert(fingerprint(g)).second)
                out.graphs.push_back(std::move(g));
    return out;
}

Verdict check_refinement(const Design& lhs, const Design& rhs, const OracleBounds& b)
{
    Verdict v;
    const Enumeration universe = enumerate_graphs(b);
    if (universe.truncated)
    {
        v.reason = "graph enumeration truncated at " + std::to_string(b.max_graphs) + " graphs";
        return v;
    }

    std::vector<Path> required = free_paths(lhs);
    for (const auto& p : free_paths(rhs))
        if (std::find(required.begin(), required.end(), p) == required.end())
            required.push_back(p);

    const SemanticsConfig cfg = b.semantics();
    bool diverged = false;
    for (const auto& g : universe.graphs)
    {
        if (!std::all_of(required.begin(), required.end(), [&](const Path& p) { return wf_path(p, g); }))
            continue;
        ++v.graphs_checked;
        Outcome l = exec(lhs, g, cfg);
        if (l.kind == Outcome::Kind::Abort)
            continue;
        ++v.graphs_constrained;
        Outcome r = exec(rhs, g, cfg);
        if (l.kind == Outcome::Kind::NonTermination || r.kind == Outcome::Kind::NonTermination)
        {
            diverged = true;
            continue;
        }
        bool refines = r.kind != Outcome::Kind::Abort;
        if (refines)
            for (const auto& fp : r.fingerprints)
                if (!std::binary_search(l.fingerprints.begin(), l.fingerprints.end(), fp))
                {
                    refines = false;
                    break;
                }
        if (!refines)
        {
            v.kind = Verdict::Kind::Counterexample;
            v.reason = r.kind == Outcome::Kind::Abort ? "rhs aborts where lhs does not"
                                                      : "rhs reaches a state the lhs does not allow";
            v.graph = g;
            v.lhs_outcome = std::move(l);
            v.rhs_outcome = std::move(r);
            return v;
        }
    }

    if (v.graphs_checked == 0)
        v.reason = "no admissible initial graph within bounds";
    else if (diverged)
        v.reason = "loop unroll limit reached";
    else
        v.kind = Verdict::Kind::Holds;
    return v;
}

Verdict check_refinement(const Design& lhs, const Design& rhs)
{
    return check_refinement(lhs, rhs, derive_bounds({lhs, rhs}));
}

Verdict validate_discharge(const Obligation& ob, const OracleBounds& b)
{
    if (ob.todo())
        throw std::invalid_argument("obligation " + std::to_string(ob.id) + " is not closed");
    return check_refinement(ob.lhs, ob.rhs, b);
}

namespace
{

void describe_outcome(std::ostringstream& os, const std::string& side, const Outcome& o)
{
    os << side << " outcome: " << to_string(o.kind);
    if (o.terminates())
        os << " (" << o.states.size() << " state" << (o.states.size() == 1 ? "" : "s") << ")";
    os << '\n';
    for (std::size_t i = 0; i < o.states.size(); ++i)
    {
        os << "  [" << side << ' ' << i << "]\n";
        std::istringstream lines(dump(o.states[i]));
        for (std::string line; std::getline(lines, line);)
            os << "    " << line << '\n';
    }
}

} // namespace

std::string describe(const Verdict& v)
{
    std::ostringstream os;
    os << "verdict: " << to_string(v.kind) << '\n';
    if (!v.reason.empty())
        os << "reason: " << v.reason << '\n';
    os << "graphs checked: " << v.graphs_checked << " (lhs defined on " << v.graphs_constrained << ")\n";
    if (v.kind == Verdict::Kind::Counterexample)
    {
        os << "initial graph:\n";
        std::istringstream lines(dump(v.graph));
        for (std::string line; std::getline(lines, line);)
            os << "  " << line << '\n';
        describe_outcome(os, "lhs", v.lhs_outcome);
        describe_outcome(os, "rhs", v.rhs_outcome);
    }
    else
        os << "note: holds at these bounds only; not a proof\n";
    return os.str();
}

} // namespace refine

#pragma once

// Fixtures and independent reference implementations used by the tests.

#include "refine/lang.hpp"
#include "refine/oracle.hpp"
#include "refine/semantics.hpp"
#include "refine/stategraph.hpp"

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace support
{

using namespace refine;

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string task_path(const std::string& name) { return std::string(REFINE_SOURCE_DIR) + "/tasks/" + name; }

inline RefinementTask load_task(const std::string& name) { return parse_task(read_file(task_path(name))); }

// Recursive object graph: r -v-> C -a-> A -b-> B, B -x-> 1, B -c-> C.
struct Fig1b
{
    StateGraph g;
    Vertex r, c, a, b, one;
};

inline Fig1b fig1b()
{
    Fig1b f;
    f.g = StateGraph::with_root();
    f.r = f.g.head();
    std::tie(f.c, f.g) = f.g.fresh_node("C");
    std::tie(f.a, f.g) = f.g.fresh_node("A");
    std::tie(f.b, f.g) = f.g.fresh_node("B");
    std::tie(f.one, f.g) = f.g.fresh_leaf(1);
    f.g = f.g.set_edge(f.r, "v", f.c);
    f.g = f.g.set_edge(f.c, "a", f.a);
    f.g = f.g.set_edge(f.a, "b", f.b);
    f.g = f.g.set_edge(f.b, "x", f.one);
    f.g = f.g.set_edge(f.b, "c", f.c);
    return f;
}

// Scope r1 holding v -> C -a-> A -b-> B -x-> 1 (the object chain before the
// local declaration).
inline StateGraph fig1a_outer()
{
    StateGraph g = StateGraph::with_root();
    const Vertex r = g.head();
    Vertex c, a, b, one;
    std::tie(c, g) = g.fresh_node("C");
    std::tie(a, g) = g.fresh_node("A");
    std::tie(b, g) = g.fresh_node("B");
    std::tie(one, g) = g.fresh_leaf(1);
    g = g.set_edge(r, "v", c);
    g = g.set_edge(c, "a", a);
    g = g.set_edge(a, "b", b);
    g = g.set_edge(b, "x", one);
    return g;
}

// Walks surface labels directly over the edge map without using Path.
inline Vertex walk_surface(const StateGraph& g, const std::vector<Label>& surface)
{
    if (surface.empty())
        return g.head();
    Vertex v = Vertex::undef();
    for (const auto& r : g.roots())
    {
        auto it = g.edges().find({{r.kind, r.id}, surface.front()});
        if (it != g.edges().end())
        {
            v = it->second;
            break;
        }
    }
    for (std::size_t i = 1; i < surface.size() && !v.is_undef(); ++i)
    {
        auto it = g.edges().find({{v.kind, v.id}, surface[i]});
        v = it == g.edges().end() ? Vertex::undef() : it->second;
    }
    return v;
}

// Brute-force good-path check: count proper prefixes landing on the owner.
inline bool good_path_bruteforce(const StateGraph& g, const std::vector<Label>& surface)
{
    if (surface.size() <= 1)
        return true;
    const std::vector<Label> owner_surface(surface.begin(), surface.end() - 1);
    const Vertex owner = walk_surface(g, owner_surface);
    int hits = 0;
    for (std::size_t len = 1; len < surface.size(); ++len)
        if (walk_surface(g, std::vector<Label>(surface.begin(), surface.begin() + static_cast<long>(len))) == owner)
            ++hits;
    return hits == 1;
}

// Random well-formed graph: one root (sometimes two scopes), a few nodes and
// leaves, random edges. Nodes may be unreachable.
inline StateGraph random_graph(std::mt19937_64& rng, const std::vector<Label>& vars, const std::vector<Label>& fields,
                               int max_nodes = 3)
{
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    StateGraph g = StateGraph::with_root();
    std::vector<Vertex> targets;
    const int nodes = 1 + static_cast<int>(pick(static_cast<std::size_t>(max_nodes)));
    for (int i = 0; i < nodes; ++i)
    {
        Vertex n;
        std::tie(n, g) = g.fresh_node("K" + std::to_string(i));
        targets.push_back(n);
    }
    for (int i = 0; i < 3; ++i)
    {
        Vertex l;
        std::tie(l, g) = g.fresh_leaf(static_cast<std::int64_t>(pick(3)));
        targets.push_back(l);
    }
    g = g.set_edge(g.head(), vars[pick(vars.size())], targets[pick(targets.size())]);
    for (const auto& v : vars)
        if (pick(2) == 0)
            g = g.set_edge(g.head(), v, targets[pick(targets.size())]);
    for (const auto& t : targets)
        if (t.is_node())
            for (const auto& f : fields)
                if (pick(3) != 0)
                    g = g.set_edge(t, f, targets[pick(targets.size())]);
    if (pick(4) == 0)
    {
        std::vector<std::pair<Label, Vertex>> inner{{vars[pick(vars.size())], targets[pick(targets.size())]}};
        g = refine::vars(inner, g);
    }
    return g;
}

inline std::vector<Label> random_surface(std::mt19937_64& rng, const std::vector<Label>& vars,
                                         const std::vector<Label>& fields, std::size_t max_len)
{
    std::vector<Label> s{vars[rng() % vars.size()]};
    const std::size_t len = 1 + rng() % max_len;
    while (s.size() < len)
        s.push_back(fields[rng() % fields.size()]);
    return s;
}

// ----------------------------------------------------------- random designs

struct DesignGen
{
    std::mt19937_64& rng;
    std::vector<Label> labels{"a", "b", "x", "y", "next"};

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng() % n); }

    Path path()
    {
        std::vector<Label> s;
        const std::size_t len = 1 + pick(3);
        for (std::size_t i = 0; i < len; ++i)
            s.push_back(labels[pick(labels.size())]);
        return Path::from_surface(s);
    }

    Expr expr(int depth)
    {
        switch (depth <= 0 ? pick(2) : pick(4))
        {
        case 0:
            return int_const(static_cast<std::int64_t>(pick(7)) - 3);
        case 1:
            return path_ref(path());
        case 2:
            return plus(expr(depth - 1), expr(depth - 1));
        default:
            return minus(expr(depth - 1), expr(depth - 1));
        }
    }

    BoolExpr boolean(int depth)
    {
        switch (depth <= 0 ? pick(5) : pick(8))
        {
        case 0:
            return b_true();
        case 1:
            return b_false();
        case 2:
            return b_eq(expr(1), expr(1));
        case 3:
            return b_lt(expr(1), expr(1));
        case 4:
            return b_alias(path(), path());
        case 5:
            return b_not(boolean(depth - 1));
        case 6:
            return b_and(boolean(depth - 1), boolean(depth - 1));
        default:
            return b_or(boolean(depth - 1), boolean(depth - 1));
        }
    }

    PostRel post(int depth)
    {
        switch (depth <= 0 ? pick(3) : pick(5))
        {
        case 0:
            return post_eq(path(), expr(1));
        case 1:
            return post_alias(path(), path());
        case 2:
            return r_true();
        case 3:
            return r_disj(post(depth - 1), post(depth - 1));
        default:
            return r_conj(post(depth - 1), post(depth - 1));
        }
    }

    std::vector<Binding> bindings()
    {
        std::vector<Binding> out;
        const std::size_t n = 1 + pick(2);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back({"t" + std::to_string(i), expr(1)});
        return out;
    }

    Design design(int depth)
    {
        switch (depth <= 0 ? pick(5) : pick(11))
        {
        case 0:
            return pp(boolean(1), post(1));
        case 1:
            return assign(path(), expr(1));
        case 2:
            return skip();
        case 3:
            return chaos();
        case 4:
            return assert_d(boolean(1));
        case 5:
        case 6:
            return seq(design(depth - 1), design(depth - 1));
        case 7:
            return cond(boolean(1), design(depth - 1), design(depth - 1));
        case 8:
            return do_loop(boolean(1), design(depth - 1));
        case 9:
            return pick(2) ? locdec(bindings(), design(depth - 1)) : method_block(bindings(), design(depth - 1));
        default:
            return choice(design(depth - 1), design(depth - 1));
        }
    }
};

// ----------------------------------------------------------- design corpus

struct CorpusEntry
{
    std::string name;
    std::string text;
};

// Designs over variables a, b and field x covering every constructor.
inline std::vector<CorpusEntry> design_corpus()
{
    return {
        {"assign-const", "a.x := 1"},
        {"assign-path", "a.x := b.x"},
        {"assign-arith", "a.x := a.x + 1"},
        {"assign-minus", "a.x := a.x - b.x"},
        {"assign-object", "a := b"},
        {"pp-eq", "[true |- a.x' = 2]"},
        {"pp-disj", "[true |- a.x' = 2 \\/ a.x' = 3]"},
        {"pp-conj", "[true |- a.x' = 1 /\\ b.x' = 0]"},
        {"pp-pre", "[a.x = 1 |- a.x' = a.x + 1]"},
        {"pp-alias-pre", "[alias(a, b) |- a.x' = 2]"},
        {"pp-alias-post", "[true |- alias(a, b)]"},
        {"pp-true", "[a.x < 2 |- true]"},
        {"seq", "a.x := 1 ; a.x := a.x + 1"},
        {"seq-pp", "[true |- a.x' = 1] ; a.x := a.x + 1"},
        {"cond", "if a.x = 0 then a.x := 1 else b.x := 2 fi"},
        {"cond-alias", "if alias(a, b) then skip else a.x := b.x fi"},
        {"do-count", "do a.x < 2 -> a.x := a.x + 1 od"},
        {"do-diverge", "do a.x = a.x -> skip od"},
        {"locdec", "var t = a.x ; b.x := t ; end"},
        {"locdec-object", "var t = a ; t.x := 2 ; end"},
        {"method", "method this = a, v = 1 ; this.x := v ; end"},
        {"skip", "skip"},
        {"chaos", "chaos"},
        {"choice", "a.x := 1 |~| a.x := 2"},
        {"choice-pp", "[true |- a.x' = 0] |~| b.x := 1"},
        {"assert", "assert a.x < 3"},
        {"assert-seq", "assert !(a.x = 0) ; a.x := 0"},
    };
}

// Test predicates over the corpus alphabet.
inline std::vector<std::pair<std::string, StatePred>> test_predicates()
{
    std::vector<std::pair<std::string, StatePred>> out;
    for (const char* text : {"a.x = 1", "a.x = 2", "b.x < 2", "alias(a, b)", "a.x = b.x", "true", "false",
                             "a.x = 1 \\/ a.x = 2"})
        out.emplace_back(text, pred_of(parse_bool(text)));
    out.emplace_back("fp-parity", [](const StateGraph& g) { return fingerprint(g).size() % 2 == 0; });
    return out;
}

// ------------------------------------------------- reference enumeration

// Assigns every slot of a fixed number of nodes independently, keeps the
// well-formed graphs and deduplicates by fingerprint of the reachable part.
inline std::set<std::string> bruteforce_graphs(const std::vector<Label>& vars, const std::vector<Label>& fields,
                                               int nodes, const std::vector<std::int64_t>& values)
{
    StateGraph base = StateGraph::with_root();
    std::vector<Vertex> node_vs;
    for (int i = 0; i < nodes; ++i)
    {
        Vertex n;
        std::tie(n, base) = base.fresh_node("Obj");
        node_vs.push_back(n);
    }
    struct Slot
    {
        Vertex src;
        Label label;
    };
    std::vector<Slot> slots;
    for (const auto& v : vars)
        slots.push_back({base.head(), v});
    for (const auto& n : node_vs)
        for (const auto& f : fields)
            slots.push_back({n, f});
    // enough leaf copies per value for any sharing pattern
    std::vector<Vertex> leaf_vs;
    for (auto v : values)
        for (std::size_t copy = 0; copy < slots.size(); ++copy)
        {
            Vertex l;
            std::tie(l, base) = base.fresh_leaf(v);
            leaf_vs.push_back(l);
        }
    const std::size_t options = 1 + leaf_vs.size() + node_vs.size();

    std::set<std::string> out;
    std::vector<std::size_t> choice(slots.size(), 0);
    while (true)
    {
        StateGraph g = base;
        for (std::size_t i = 0; i < slots.size(); ++i)
        {
            const std::size_t c = choice[i];
            if (c == 0)
                continue;
            const Vertex dst = c <= leaf_vs.size() ? leaf_vs[c - 1] : node_vs[c - 1 - leaf_vs.size()];
            g = g.set_edge(slots[i].src, slots[i].label, dst);
        }
        if (wf_graph(g))
        {
            // reachable node count
            std::set<std::int64_t> seen;
            std::vector<Vertex> stack;
            for (const auto& [l, v] : g.out_edges(g.head()))
                stack.push_back(v);
            while (!stack.empty())
            {
                Vertex v = stack.back();
                stack.pop_back();
                if (!v.is_node() || !seen.insert(v.id).second)
                    continue;
                for (const auto& [l, w] : g.out_edges(v))
                    stack.push_back(w);
            }
            if (static_cast<int>(seen.size()) <= nodes)
                out.insert(fingerprint(g));
        }
        std::size_t k = 0;
        while (k < choice.size() && ++choice[k] == options)
            choice[k++] = 0;
        if (k == choice.size())
            break;
    }
    return out;
}

} // namespace support

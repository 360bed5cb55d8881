#include "doctest.h"
#include "support.hpp"

using namespace refine;

namespace
{

Path P(const char* s) { return Path::parse(s); }

OracleBounds small_bounds()
{
    OracleBounds b;
    b.max_nodes = 2;
    b.values = {0, 1, 2};
    b.var_labels = {"a", "b"};
    b.field_labels = {"x"};
    return b;
}

// a -> object whose x holds `value`
StateGraph object_with_x(std::int64_t value)
{
    StateGraph g = StateGraph::with_root();
    Vertex n, l;
    std::tie(n, g) = g.fresh_node("A");
    std::tie(l, g) = g.fresh_leaf(value);
    g = g.set_edge(g.head(), "a", n);
    return g.set_edge(n, "x", l);
}

std::optional<std::int64_t> x_of(const StateGraph& g, const char* path = "a.x")
{
    const Vertex v = get_vertex_path(P(path), g);
    if (!v.is_leaf())
        return std::nullopt;
    return v.value;
}

// Second evaluator: resolves paths with the brute-force walk and decides
// definedness before evaluating.
struct RefEval
{
    const StateGraph& g;

    std::optional<std::int64_t> num(const Expr& e) const
    {
        if (const auto* c = std::get_if<IntConst>(&e.node))
            return c->value;
        if (const auto* r = std::get_if<PathRef>(&e.node))
        {
            const Vertex v = support::walk_surface(g, r->path.surface());
            return v.is_leaf() ? std::optional<std::int64_t>(v.value) : std::nullopt;
        }
        const Rc<Expr>* l;
        const Rc<Expr>* r;
        bool add;
        if (const auto* p = std::get_if<Plus>(&e.node))
            l = &p->left, r = &p->right, add = true;
        else
        {
            const auto& m = std::get<Minus>(e.node);
            l = &m.left, r = &m.right, add = false;
        }
        auto x = num(**l);
        auto y = num(**r);
        if (!x || !y)
            return std::nullopt;
        return add ? *x + *y : *x - *y;
    }

    bool defined(const BoolExpr& b) const
    {
        if (const auto* e = std::get_if<Eq>(&b.node))
            return num(e->left) && num(e->right);
        if (const auto* e = std::get_if<Lt>(&b.node))
            return num(e->left) && num(e->right);
        if (const auto* n = std::get_if<Not>(&b.node))
            return defined(*n->operand);
        if (const auto* a = std::get_if<And>(&b.node))
            return defined(*a->left) && defined(*a->right);
        if (const auto* o = std::get_if<Or>(&b.node))
            return defined(*o->left) && defined(*o->right);
        if (const auto* a = std::get_if<Alias>(&b.node))
            return !support::walk_surface(g, a->first.surface()).is_undef() &&
                   !support::walk_surface(g, a->second.surface()).is_undef();
        return true;
    }

    bool value(const BoolExpr& b) const
    {
        if (std::holds_alternative<TrueB>(b.node))
            return true;
        if (std::holds_alternative<FalseB>(b.node))
            return false;
        if (const auto* e = std::get_if<Eq>(&b.node))
            return *num(e->left) == *num(e->right);
        if (const auto* e = std::get_if<Lt>(&b.node))
            return *num(e->left) < *num(e->right);
        if (const auto* n = std::get_if<Not>(&b.node))
            return !value(*n->operand);
        if (const auto* a = std::get_if<And>(&b.node))
            return value(*a->left) && value(*a->right);
        if (const auto* o = std::get_if<Or>(&b.node))
            return value(*o->left) || value(*o->right);
        const auto& a = std::get<Alias>(b.node);
        return support::walk_surface(g, a.first.surface()) == support::walk_surface(g, a.second.surface());
    }

    bool eval(const BoolExpr& b) const { return defined(b) && value(b); }
};

} // namespace

TEST_CASE("eval_bool")
{
    const StateGraph g = object_with_x(2);
    CHECK(eval_bool(parse_bool("a.x = 2"), g));
    CHECK_FALSE(eval_bool(parse_bool("a.y = 2"), g));
    CHECK_FALSE(eval_bool(parse_bool("!(a.y = 2)"), g)); // ill-formed is false, not negated
    CHECK_FALSE(try_eval_bool(parse_bool("true \\/ a.y = 1"), g).has_value());
    CHECK(eval_bool(parse_bool("a.x - 3 < 0"), g));
    CHECK_FALSE(eval_bool(parse_bool("a + 1 = 1"), g)); // arithmetic over a node

    const auto f = support::fig1b();
    CHECK(eval_bool(parse_bool("alias(v.a, v.a.b.c.a)"), f.g));
}

TEST_CASE("eval_bool agrees with an independent evaluator")
{
    std::mt19937_64 rng(23);
    support::DesignGen gen{rng};
    gen.labels = {"a", "b", "x"};
    int defined = 0;
    for (int i = 0; i < 2000; ++i)
    {
        const StateGraph g = support::random_graph(rng, {"a", "b"}, {"x"});
        const BoolExpr b = gen.boolean(3);
        const RefEval ref{g};
        CHECK_MESSAGE(eval_bool(b, g) == ref.eval(b), render(b));
        CHECK(try_eval_bool(b, g).has_value() == ref.defined(b));
        defined += ref.defined(b);
    }
    CHECK(defined > 500);
}

TEST_CASE("exec of basic designs")
{
    const StateGraph g = object_with_x(0);

    const Outcome a = exec(parse_design("a.x := 1"), g);
    REQUIRE(a.kind == Outcome::Kind::Terminates);
    REQUIRE(a.states.size() == 1);
    CHECK(x_of(a.states[0]) == 1);

    const Outcome d = exec(parse_design("[true |- a.x' = 2 \\/ a.x' = 3]"), g);
    REQUIRE(d.kind == Outcome::Kind::Terminates);
    REQUIRE(d.states.size() == 2);
    std::set<std::int64_t> xs;
    for (const auto& s : d.states)
        xs.insert(*x_of(s));
    CHECK(xs == std::set<std::int64_t>{2, 3});

    CHECK(exec(parse_design("[a.x = 5 |- a.x' = 1]"), g).kind == Outcome::Kind::Abort);
    CHECK(exec(parse_design("[true |- a.x' = 1 /\\ a.x' = 2]"), g).kind == Outcome::Kind::Magic);
    CHECK(exec(chaos(), g).kind == Outcome::Kind::Abort);
    CHECK(exec(parse_design("a.y := 1"), g).kind == Outcome::Kind::Abort);
    CHECK(exec(parse_design("do true -> skip od"), g).kind == Outcome::Kind::NonTermination);

    const Outcome loop = exec(parse_design("do a.x < 3 -> a.x := a.x + 1 od"), g);
    REQUIRE(loop.states.size() == 1);
    CHECK(x_of(loop.states[0]) == 3);
}

TEST_CASE("exec of the setter call followed by an increment")
{
    const RefinementTask t = parse_task(support::read_file(support::task_path("b1_ref_b3.task")));
    OracleBounds b = derive_bounds({t.lhs, t.rhs});
    const Enumeration all = enumerate_graphs(b);
    int runs = 0;
    for (const auto& g : all.graphs)
    {
        if (!wf_path(P("a.x"), g))
            continue;
        const Outcome o = exec(t.rhs, g, b.semantics());
        REQUIRE(o.kind == Outcome::Kind::Terminates);
        REQUIRE(o.states.size() == 1);
        CHECK(x_of(o.states[0]) == 2);
        // everything except a.x is untouched
        CHECK(fingerprint(o.states[0]) == fingerprint(exec(parse_design("a.x := 2"), g).states[0]));
        ++runs;
    }
    CHECK(runs > 0);
}

TEST_CASE("wp examples")
{
    OracleBounds b = small_bounds();
    const Enumeration all = enumerate_graphs(b);
    const StatePred x_is_5 = pred_of(parse_bool("a.x = 5"));
    const StatePred x_is_4 = pred_of(parse_bool("a.x = 4"));
    const StatePred wp_assign = wp(parse_design("a.x := 5"), x_is_5);
    const StatePred wp_spec = wp(parse_design("[true |- a.x' = 2 \\/ a.x' = 3]"), x_is_4);
    const StatePred wp_chaos = wp(chaos(), pred_of(b_true()));
    int wf = 0;
    for (const auto& g : all.graphs)
    {
        CHECK_FALSE(wp_chaos(g));
        CHECK_FALSE(wp_spec(g));
        if (wf_path(P("a.x"), g))
        {
            CHECK(wp_assign(g));
            ++wf;
        }
    }
    CHECK(wf > 0);
}

TEST_CASE("wp of a sequence is the composition")
{
    std::mt19937_64 rng(29);
    const Design c = parse_design("a.x := a.x + 1");
    const Design d = parse_design("[a.x < 3 |- b.x' = a.x]");
    const StatePred q = pred_of(parse_bool("b.x = 2"));
    const StatePred lhs = wp(seq(c, d), q);
    const StatePred rhs = wp(c, wp(d, q));
    for (const auto& g : enumerate_graphs(small_bounds()).graphs)
        CHECK(lhs(g) == rhs(g));
}

TEST_CASE("a local block around skip leaves the old scope alone")
{
    const Design d = parse_design("var t = a.x ; skip ; end");
    for (const auto& g : enumerate_graphs(small_bounds()).graphs)
    {
        if (!wf_path(P("a.x"), g))
            continue;
        const Outcome o = exec(d, g);
        REQUIRE(o.states.size() == 1);
        CHECK(resolution_equivalent(o.states[0], g, {"a", "b", "x"}, 3));
        CHECK(fingerprint(o.states[0]) == fingerprint(g));
    }
}

TEST_CASE("monotonicity sampling")
{
    const std::vector<StateGraph> graphs = enumerate_graphs(small_bounds()).graphs;
    CHECK(is_monotonic_sampled(parse_design("a.x := 1"), graphs, 500, 1).monotonic);
    CHECK(is_monotonic_sampled(chaos(), graphs, 50, 2).monotonic);
    CHECK(is_monotonic_sampled(parse_design("[true |- a.x' = 1 \\/ b.x' = 2]"), graphs, 50, 3).monotonic);

    // q |-> !q is as far from monotonic as it gets
    const Transformer negate = [](StatePred q) { return [q](const StateGraph& g) { return !q(g); }; };
    const MonotonicityReport r = is_monotonic_sampled(negate, graphs, 50, 4);
    CHECK_FALSE(r.monotonic);
    CHECK(r.witness.find("roots:") != std::string::npos);
}

TEST_CASE("wp and exec correspond on the corpus")
{
    const OracleBounds b = small_bounds();
    const SemanticsConfig cfg = b.semantics();
    const std::vector<StateGraph> graphs = enumerate_graphs(b).graphs;
    const auto preds = support::test_predicates();
    std::size_t mismatches = 0;
    for (const auto& entry : support::design_corpus())
    {
        const Design d = parse_design(entry.text);
        for (const auto& g : graphs)
        {
            const Outcome o = exec(d, g, cfg);
            for (const auto& [name, q] : preds)
            {
                std::optional<bool> w;
                try
                {
                    w = wp(d, q, cfg)(g);
                }
                catch (const LoopBoundExceeded&)
                {
                }
                if (!w)
                {
                    if (o.terminates())
                        ++mismatches;
                    continue;
                }
                bool rel = o.terminates();
                if (rel)
                    for (const auto& s : o.states)
                        rel = rel && q(s);
                if (*w != rel)
                {
                    ++mismatches;
                    MESSAGE(entry.name << " / " << name << "\n" << dump(g));
                }
            }
        }
    }
    CHECK(mismatches == 0);
}

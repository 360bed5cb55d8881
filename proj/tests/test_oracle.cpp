#include "doctest.h"
#include "support.hpp"

using namespace refine;

namespace
{

Verdict check_text(const char* lhs, const char* rhs)
{
    return check_refinement(parse_design(lhs), parse_design(rhs));
}

std::set<std::string> fingerprints(const Enumeration& e)
{
    std::set<std::string> out;
    for (const auto& g : e.graphs)
        out.insert(fingerprint(g));
    return out;
}

} // namespace

TEST_CASE("enumeration of the single-label alphabet")
{
    OracleBounds b;
    b.max_nodes = 1;
    b.values = {0, 1};
    b.var_labels = {"x"};
    b.field_labels = {"x"};
    const Enumeration e = enumerate_graphs(b);
    CHECK_FALSE(e.truncated);
    const std::set<std::string> fps = fingerprints(e);

    auto build = [](std::optional<std::int64_t> node_leaf, std::optional<std::int64_t> root_leaf) {
        StateGraph g = StateGraph::with_root();
        Vertex l;
        if (root_leaf)
        {
            std::tie(l, g) = g.fresh_leaf(*root_leaf);
            return g.set_edge(g.head(), "x", l);
        }
        Vertex n;
        std::tie(n, g) = g.fresh_node("Obj");
        std::tie(l, g) = g.fresh_leaf(*node_leaf);
        g = g.set_edge(g.head(), "x", n);
        return g.set_edge(n, "x", l);
    };
    for (std::int64_t v : {0, 1})
    {
        CHECK(fps.count(fingerprint(build(v, std::nullopt))) == 1);
        CHECK(fps.count(fingerprint(build(std::nullopt, v))) == 1);
    }
    // plus the node without a field edge and the node looping on itself
    CHECK(e.graphs.size() == 6);
}

TEST_CASE("empty alphabet yields nothing")
{
    OracleBounds b;
    b.var_labels = {};
    b.field_labels = {"x"};
    CHECK(enumerate_graphs(b).graphs.empty());
}

TEST_CASE("enumeration matches a brute-force generator")
{
    struct Case
    {
        std::vector<Label> vars, fields;
        int nodes;
        std::vector<std::int64_t> values;
    };
    for (const Case& c : {Case{{"a"}, {"x"}, 2, {0, 1}}, Case{{"a", "b"}, {"x"}, 2, {0, 1}},
                          Case{{"a"}, {"x", "y"}, 2, {0}}, Case{{"a", "b"}, {"x"}, 1, {0, 1, 2}}})
    {
        OracleBounds b;
        b.max_nodes = c.nodes;
        b.values = c.values;
        b.var_labels = c.vars;
        b.field_labels = c.fields;
        const Enumeration e = enumerate_graphs(b);
        const std::set<std::string> expected = support::bruteforce_graphs(c.vars, c.fields, c.nodes, c.values);
        CHECK(fingerprints(e) == expected);
        CHECK(e.graphs.size() == expected.size());
        for (const auto& g : e.graphs)
            CHECK(wf_graph(g));
    }
}

TEST_CASE("truncation is reported")
{
    OracleBounds b;
    b.var_labels = {"a", "b"};
    b.field_labels = {"x", "y"};
    b.max_graphs = 100;
    CHECK(enumerate_graphs(b).truncated);
    const Verdict v = check_refinement(parse_design("a.x := 1"), parse_design("a.x := 1"), b);
    CHECK(v.kind == Verdict::Kind::Unknown);
}

TEST_CASE("refinement chain of the running example")
{
    const char* b1 = "[true |- a.x' = 2 \\/ a.x' = 3]";
    const char* b2 = "[true |- a.x' = 1] ; a.x := a.x + 1";
    const RefinementTask t = parse_task(support::read_file(support::task_path("b1_ref_b3.task")));
    const Design b3 = t.rhs;

    CHECK(check_text(b1, b2).kind == Verdict::Kind::Holds);
    CHECK(check_refinement(parse_design(b2), b3).kind == Verdict::Kind::Holds);
    const Verdict v = check_refinement(parse_design(b1), b3);
    CHECK(v.kind == Verdict::Kind::Holds);
    CHECK(v.graphs_checked > 0);

    // not the other way round
    CHECK(check_refinement(b3, parse_design(b1)).kind == Verdict::Kind::Counterexample);
}

TEST_CASE("reflexivity and refutation")
{
    CHECK(check_text("a.x := a.x + 1", "a.x := a.x + 1").kind == Verdict::Kind::Holds);
    CHECK(check_text("skip", "skip").kind == Verdict::Kind::Unknown); // no labels, no graphs

    const Verdict v = check_text("[true |- a.x' = 2]", "a.x := 3");
    REQUIRE(v.kind == Verdict::Kind::Counterexample);
    CHECK(wf_graph(v.graph));
    CHECK(wf_path(Path::parse("a.x"), v.graph));
    const std::string report = describe(v);
    CHECK(report.find("lhs outcome") != std::string::npos);
    CHECK(report.find("rhs outcome") != std::string::npos);
    CHECK(report.find("=2") != std::string::npos);
    CHECK(report.find("=3") != std::string::npos);
}

TEST_CASE("alias-constrained specification")
{
    const Verdict v = check_text("[alias(a, b) |- a.x' = 3]", "b.x := 3");
    CHECK(v.kind == Verdict::Kind::Holds);
    CHECK(v.graphs_constrained > 0);
    CHECK(v.graphs_constrained < v.graphs_checked);

    CHECK(check_text("[true |- a.x' = 3]", "b.x := 3").kind == Verdict::Kind::Counterexample);
}

TEST_CASE("graphs without the needed node give Unknown")
{
    OracleBounds b = derive_bounds({parse_design("a.x := 1")});
    b.max_nodes = 0;
    const Verdict v = check_refinement(parse_design("a.x := 1"), parse_design("a.x := 1"), b);
    CHECK(v.kind == Verdict::Kind::Unknown);
}

TEST_CASE("counterexamples come from the smallest graphs")
{
    const Verdict v = check_text("[true |- a.x' = 2]", "a.x := 3");
    REQUIRE(v.kind == Verdict::Kind::Counterexample);
    int nodes = 0;
    for (const auto& [key, dst] : v.graph.edges())
        nodes += key.first.first == VertexKind::Root && dst.is_node();
    CHECK(nodes == 1);
}

#include "doctest.h"
#include "support.hpp"

#include "refine/search.hpp"

#include <algorithm>
#include <chrono>

using namespace refine;

namespace
{

Design D(const char* s) { return parse_design(s); }

SearchResult run(const RefinementTask& t, SearchConfig cfg = {})
{
    return search(init_store(t), select_rules(t.rule_groups), make_context(t, cfg), cfg);
}

SearchResult run(const std::string& task_file, SearchConfig cfg = {}) { return run(support::load_task(task_file), cfg); }

std::vector<std::string> sorted(std::vector<std::string> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle)
{
    return std::any_of(problems.begin(), problems.end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

} // namespace

TEST_CASE("initial store holds the single goal")
{
    const RefinementTask t = support::load_task("b1_ref_b3.task");
    const ObligationStore s = init_store(t);
    REQUIRE(s.obligations().size() == 1);
    CHECK(s.at(0).lhs == t.lhs);
    CHECK(s.at(0).rhs == t.rhs);
    CHECK(s.at(0).todo());
    CHECK_FALSE(proof_complete(s));
    const RuleContext ctx = make_context(t, {});
    for (std::int64_t c : {1, 2, 3})
        CHECK(std::find(ctx.constants.begin(), ctx.constants.end(), c) != ctx.constants.end());
}

TEST_CASE("skip refines skip by reflexivity alone")
{
    const SearchResult r = run("skip.task");
    REQUIRE(r.proved);
    CHECK(r.rule_names() == std::vector<std::string>{"ref-reflexive"});
    CHECK(verify_proof(r.store, false, {}).empty());
}

TEST_CASE("the running example takes seventeen steps")
{
    const auto t0 = std::chrono::steady_clock::now();
    const SearchResult r = run("b1_ref_b3.task");
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    REQUIRE(r.proved);
    CHECK(ms.count() < 5000);
    CHECK(r.failure == FailureKind::None);
    CHECK_FALSE(r.stats.fell_back);

    const std::vector<std::string> expected{
        "ref-mcall-gen",  "ref-sequential-gen1", "ref-sequential-gen2",     "is-ident",
        "ref-mcall",      "ref-sequential",      "ref-transitive-gen-left", "ref-add-gen",
        "ref-add",        "ref-transitive-gen-left", "ref-pp-assign",       "ref-disj-left",
        "ref-transitive-gen-right", "ref-pp-assign", "ref-transitive",      "ref-transitive",
        "ref-transitive"};
    CHECK(r.trace.size() == 17);
    CHECK(sorted(r.rule_names()) == sorted(expected));
    CHECK(r.store.open_count() == 0);
    CHECK(r.store.residual_count() == 0);
    CHECK(verify_proof(r.store, false, {}).empty());
}

TEST_CASE("search is deterministic")
{
    const SearchResult a = run("b1_ref_b3.task");
    const SearchResult b = run("b1_ref_b3.task");
    REQUIRE(a.proved);
    REQUIRE(b.proved);
    CHECK(a.rule_names() == b.rule_names());
    CHECK(a.store.fingerprint() == b.store.fingerprint());
    for (std::size_t i = 0; i < a.trace.size(); ++i)
    {
        CHECK(a.trace[i].target == b.trace[i].target);
        CHECK(a.trace[i].detail == b.trace[i].detail);
    }
}

TEST_CASE("first-found mode also yields a valid proof")
{
    SearchConfig cfg;
    cfg.prefer_shortest = false;
    const SearchResult r = run("b1_ref_b3.task", cfg);
    REQUIRE(r.proved);
    CHECK(r.trace.size() >= 17);
    CHECK(verify_proof(r.store, false, {}).empty());
}

TEST_CASE("other shipped tasks")
{
    SUBCASE("alias")
    {
        const SearchResult r = run("alias_assign.task");
        REQUIRE(r.proved);
        const auto names = r.rule_names();
        CHECK(std::find(names.begin(), names.end(), "ref-alias-assign") != names.end());
        CHECK(verify_proof(r.store, false, {}).empty());
    }
    SUBCASE("congruence under a conditional")
    {
        const SearchResult r = run("cond_branch.task");
        REQUIRE(r.proved);
        const auto names = r.rule_names();
        CHECK(std::find(names.begin(), names.end(), "cond-congruence") != names.end());
        CHECK(verify_proof(r.store, false, {}).empty());
    }
    SUBCASE("b2 refined by b3")
    {
        const SearchResult r = run("b2_ref_b3.task");
        REQUIRE(r.proved);
        CHECK(verify_proof(r.store, false, {}).empty());
    }
}

TEST_CASE("explore_step")
{
    const RefinementTask t = support::load_task("b1_ref_b3.task");
    const auto rules = select_rules({});
    const RuleContext ctx = make_context(t, {});
    const ObligationStore s = init_store(t);

    const auto next = explore_step(s, rules, ctx);
    REQUIRE_FALSE(next.empty());
    // the input is untouched
    CHECK(s.obligations().size() == 1);
    CHECK(s.at(0).todo());
    for (const auto& n : next)
        CHECK(n.fingerprint() != s.fingerprint());

    const auto succ = successors(s, rules, ctx);
    REQUIRE(succ.size() == next.size());
    CHECK(succ[0].steps.front().rule == "ref-mcall-gen");
    CHECK(succ[0].store.fingerprint() == next[0].fingerprint());

    // one more step from the first successor: the split is now available
    const auto second = successors(succ[0].store, rules, ctx);
    const bool has_split = std::any_of(second.begin(), second.end(), [](const Successor& x) {
        return x.steps.front().rule == "ref-sequential-gen1";
    });
    CHECK(has_split);

    // a closed store has nowhere to go
    const SearchResult done = run(t);
    REQUIRE(done.proved);
    CHECK(explore_step(done.store, rules, ctx).empty());
}

TEST_CASE("equations close identical obligations immediately")
{
    ObligationStore s(D("a.x := 1"), D("a.x := 1"));
    const auto steps = close_equations(s, select_rules({}), {});
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].rule == "ref-reflexive");
    CHECK(s.root_done());
}

TEST_CASE("every step along the trace makes progress")
{
    const RefinementTask t = support::load_task("b1_ref_b3.task");
    const auto rules = select_rules({});
    const RuleContext ctx = make_context(t, {});
    const SearchResult r = run(t);
    REQUIRE(r.proved);

    // replay the trace from scratch, matching each step by rule and target
    ObligationStore s = init_store(t);
    std::size_t i = 0;
    while (i < r.trace.size())
    {
        const auto succ = successors(s, rules, ctx);
        const auto it = std::find_if(succ.begin(), succ.end(), [&](const Successor& x) {
            return x.steps.front().rule == r.trace[i].rule && x.steps.front().target == r.trace[i].target &&
                   x.steps.front().detail == r.trace[i].detail;
        });
        REQUIRE_MESSAGE(it != succ.end(), "step " << i << " " << r.trace[i].rule);
        const bool grew = it->store.obligations().size() > s.obligations().size();
        const bool closed = it->store.open_count() < s.open_count() + (it->store.obligations().size() -
                                                                         s.obligations().size());
        CHECK((grew || closed));
        i += it->steps.size();
        s = it->store;
    }
    CHECK(proof_complete(s));
    CHECK(s.fingerprint() == r.store.fingerprint());
}

TEST_CASE("search bounds")
{
    SUBCASE("obligation cap")
    {
        SearchConfig cfg;
        cfg.max_obligations = 3;
        const SearchResult r = run("b1_ref_b3.task", cfg);
        CHECK_FALSE(r.proved);
        CHECK(r.failure == FailureKind::Bound);
    }
    SUBCASE("depth cap")
    {
        SearchConfig cfg;
        cfg.max_depth = 4;
        const SearchResult r = run("b1_ref_b3.task", cfg);
        CHECK_FALSE(r.proved);
        CHECK(r.failure == FailureKind::Bound);
    }
    SUBCASE("nonsense bounds")
    {
        SearchConfig cfg;
        cfg.time_limit_ms = 0;
        CHECK_THROWS_AS(run("skip.task", cfg), std::invalid_argument);
    }
}

TEST_CASE("a false refinement exhausts the rules")
{
    const SearchResult r = run("refute.task");
    CHECK_FALSE(r.proved);
    CHECK(r.failure == FailureKind::Exhausted);
    CHECK_FALSE(r.reason.empty());
}

TEST_CASE("strengthening leaves a residual and needs permission")
{
    const RefinementTask t = support::load_task("drop_disjunct.task");
    const SearchResult without = run(t);
    CHECK_FALSE(without.proved);

    SearchConfig cfg;
    cfg.allow_sorry = true;
    const SearchResult with = run(t, cfg);
    REQUIRE(with.proved);
    CHECK(with.store.residual_count() == 1);
    CHECK(with.rule_names() == std::vector<std::string>{"ref-strengthen"});
    CHECK(verify_proof(with.store, true, {}).empty());
    CHECK(mentions(verify_proof(with.store, false, {}), "sorry"));
}

TEST_CASE("verify_proof rejects tampered stores")
{
    SUBCASE("open root")
    {
        const ObligationStore s(D("skip"), D("skip"));
        CHECK_FALSE(verify_proof(s, false, {}).empty());
    }
    SUBCASE("unknown lemma")
    {
        ObligationStore s(D("a.x := 1"), D("a.x := 1"));
        s.set_status(0, Discharged{"made-up", "bogus_lemma", {}, {}, {}});
        CHECK(mentions(verify_proof(s, false, {}), "bogus_lemma"));
    }
    SUBCASE("circular justification")
    {
        ObligationStore s(D("[true |- a.x' = 1]"), D("a.x := 1"));
        s.add(D("a.x := 1"), D("[true |- a.x' = 1]"));
        s.set_status(0, Discharged{"ref-transitive", "ref_transitive", {1, 0}, {}, {}});
        s.set_status(1, Discharged{"ref-transitive", "ref_transitive", {0, 1}, {}, {}});
        CHECK(mentions(verify_proof(s, false, {}), "cycle"));
    }
    SUBCASE("dangling reference")
    {
        ObligationStore s(D("a.x := 1"), D("a.x := 1"));
        s.set_status(0, Discharged{"ref-transitive", "ref_transitive", {7, 8}, {}, {}});
        CHECK_FALSE(verify_proof(s, false, {}).empty());
    }
    SUBCASE("a wrong discharge is refuted by the oracle")
    {
        ObligationStore s(D("a.x := 1"), D("[true |- a.x' = 1 \\/ a.x' = 2]"));
        s.set_status(0, Discharged{"ref-disj-left", "ref_disj_left", {}, {}, {}});
        CHECK(mentions(verify_proof(s, false, {}), "fails the oracle"));
    }
}

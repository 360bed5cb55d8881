#include "refine/search.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <queue>
#include <set>
#include <unordered_set>

namespace refine
{

ObligationStore init_store(const RefinementTask& task) { return ObligationStore(task.lhs, task.rhs); }

RuleContext make_context(const RefinementTask& task, const SearchConfig& cfg)
{
    RuleContext ctx;
    ctx.allow_sorry = cfg.allow_sorry;
    std::set<std::int64_t> seen;
    for (const Design* d : {&task.lhs, &task.rhs})
        for (auto c : constants(*d))
            if (seen.insert(c).second)
                ctx.constants.push_back(c);
    return ctx;
}

std::vector<TraceStep> close_equations(ObligationStore& store, const std::vector<const Rule*>& rules,
                                       const RuleContext& ctx)
{
    std::vector<TraceStep> steps;
    for (bool changed = true; changed;)
    {
        changed = false;
        for (const Rule* r : rules)
        {
            if (r->kind != RuleKind::Equation)
                continue;
            auto apps = match(*r, store, ctx);
            if (apps.empty())
                continue;
            const Application& a = apps.front();
            store = apply(a, store);
            steps.push_back({r->name, a.target, a.detail});
            changed = true;
            break;
        }
    }
    return steps;
}

std::vector<Successor> successors(const ObligationStore& store, const std::vector<const Rule*>& rules,
                                  const RuleContext& ctx)
{
    std::vector<Successor> out;
    // Discharges only close obligations and never disable one another, so
    // when one is available it is taken alone.
    for (const Rule* r : rules)
    {
        if (r->kind != RuleKind::Discharge)
            continue;
        auto apps = match(*r, store, ctx);
        if (apps.empty())
            continue;
        Successor s{apply(apps.front(), store), {{r->name, apps.front().target, apps.front().detail}}};
        auto eq = close_equations(s.store, rules, ctx);
        s.steps.insert(s.steps.end(), eq.begin(), eq.end());
        out.push_back(std::move(s));
        return out;
    }
    for (const Rule* r : rules)
    {
        if (r->kind == RuleKind::Equation || r->kind == RuleKind::Discharge)
            continue;
        for (const auto& a : match(*r, store, ctx))
        {
            Successor s{apply(a, store), {{r->name, a.target, a.detail}}};
            auto eq = close_equations(s.store, rules, ctx);
            s.steps.insert(s.steps.end(), eq.begin(), eq.end());
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<ObligationStore> explore_step(const ObligationStore& store, const std::vector<const Rule*>& rules,
                                          const RuleContext& ctx)
{
    std::vector<ObligationStore> out;
    for (auto& s : successors(store, rules, ctx))
        out.push_back(std::move(s.store));
    return out;
}

namespace
{

const Discharged* discharged(const Obligation& o) { return std::get_if<Discharged>(&o.status); }

// ids the root depends on, root included
std::vector<int> reachable(const ObligationStore& store)
{
    std::vector<int> order;
    std::vector<bool> seen(static_cast<std::size_t>(store.next_id()), false);
    std::vector<int> stack{store.root_id()};
    while (!stack.empty())
    {
        const int id = stack.back();
        stack.pop_back();
        if (id < 0 || id >= store.next_id() || seen[static_cast<std::size_t>(id)])
            continue;
        seen[static_cast<std::size_t>(id)] = true;
        order.push_back(id);
        if (const auto* d = discharged(store.at(id)))
            for (int f : d->from)
                stack.push_back(f);
    }
    std::sort(order.begin(), order.end());
    return order;
}

std::size_t closed_count(const ObligationStore& store)
{
    return store.obligations().size() - store.open_count();
}

using Clock = std::chrono::steady_clock;

struct Limits
{
    Clock::time_point start;
    Clock::time_point deadline;
    bool expired() const { return Clock::now() >= deadline; }
};

struct Explorer
{
    const std::vector<const Rule*>& rules;
    const RuleContext& ctx;
    const SearchConfig& cfg;
    SearchStats stats;
    bool bound_hit = false;
    ObligationStore best;

    void note_partial(const ObligationStore& s)
    {
        if (closed_count(s) > closed_count(best))
            best = s;
    }

    // successors that stay within the bounds
    std::vector<Successor> expand(const ObligationStore& s, std::size_t depth)
    {
        ++stats.expanded;
        std::vector<Successor> out;
        for (auto& succ : successors(s, rules, ctx))
        {
            ++stats.generated;
            if (succ.store.obligations().size() > cfg.max_obligations ||
                depth + succ.steps.size() > static_cast<std::size_t>(cfg.max_depth))
            {
                bound_hit = true;
                continue;
            }
            out.push_back(std::move(succ));
        }
        return out;
    }
};

struct Node
{
    ObligationStore store;
    std::vector<TraceStep> trace;
    std::vector<int> priorities;
};

// Uniform cost on the number of steps; ties go to the lexicographically
// smallest sequence of rule priorities.
struct Key
{
    std::size_t cost;
    const std::vector<int>* priorities;
    std::size_t index;

    bool operator>(const Key& o) const
    {
        if (cost != o.cost)
            return cost > o.cost;
        if (*priorities != *o.priorities)
            return *priorities > *o.priorities;
        return index > o.index;
    }
};

std::vector<int> priorities_of(const std::vector<TraceStep>& steps, const std::vector<const Rule*>& rules,
                               std::vector<int> base)
{
    for (const auto& s : steps)
    {
        int p = 0;
        for (const Rule* r : rules)
            if (r->name == s.rule)
            {
                p = r->priority;
                break;
            }
        base.push_back(p);
    }
    return base;
}

enum class Outcome3
{
    Found,
    Exhausted,
    Timeout
};

Outcome3 shortest(Explorer& ex, const Node& root, const Limits& lim, Node& found)
{
    std::vector<Node> nodes{root};
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> open;
    std::unordered_set<std::string> closed;
    // keys point in here; a deque keeps them valid while it grows
    std::deque<std::vector<int>> prio_store{root.priorities};
    open.push({root.trace.size(), &prio_store.back(), 0});
    while (!open.empty())
    {
        if (lim.expired())
            return Outcome3::Timeout;
        const Key k = open.top();
        open.pop();
        const Node current = nodes[k.index];
        if (!closed.insert(current.store.fingerprint()).second)
            continue;
        ex.note_partial(current.store);
        if (proof_complete(current.store))
        {
            found = current;
            return Outcome3::Found;
        }
        for (auto& succ : ex.expand(current.store, current.trace.size()))
        {
            if (closed.count(succ.store.fingerprint()))
                continue;
            Node n{std::move(succ.store), current.trace, {}};
            n.priorities = priorities_of(succ.steps, ex.rules, current.priorities);
            n.trace.insert(n.trace.end(), succ.steps.begin(), succ.steps.end());
            prio_store.push_back(n.priorities);
            const std::size_t cost = n.trace.size();
            nodes.push_back(std::move(n));
            open.push({cost, &prio_store.back(), nodes.size() - 1});
        }
    }
    return Outcome3::Exhausted;
}

Outcome3 first_found(Explorer& ex, const Node& root, const Limits& lim, Node& found)
{
    std::unordered_set<std::string> visited;
    bool timed_out = false;
    std::function<bool(const Node&)> dfs = [&](const Node& n) {
        if (lim.expired())
        {
            timed_out = true;
            return false;
        }
        if (!visited.insert(n.store.fingerprint()).second)
            return false;
        ex.note_partial(n.store);
        if (proof_complete(n.store))
        {
            found = n;
            return true;
        }
        for (auto& succ : ex.expand(n.store, n.trace.size()))
        {
            Node child{std::move(succ.store), n.trace, {}};
            child.trace.insert(child.trace.end(), succ.steps.begin(), succ.steps.end());
            if (dfs(child))
                return true;
            if (timed_out)
                return false;
        }
        return false;
    };
    if (dfs(root))
        return Outcome3::Found;
    return timed_out ? Outcome3::Timeout : Outcome3::Exhausted;
}

} // namespace

bool proof_complete(const ObligationStore& store)
{
    if (!store.root_done())
        return false;
    for (int id : reachable(store))
        if (store.at(id).todo())
            return false;
    return true;
}

std::string to_string(FailureKind k)
{
    switch (k)
    {
    case FailureKind::None:
        return "none";
    case FailureKind::Timeout:
        return "timeout";
    case FailureKind::Exhausted:
        return "exhausted";
    case FailureKind::Bound:
        return "bound";
    }
    return "?";
}

std::vector<std::string> SearchResult::rule_names() const
{
    std::vector<std::string> out;
    for (const auto& s : trace)
        out.push_back(s.rule);
    return out;
}

SearchResult search(const ObligationStore& initial, const std::vector<const Rule*>& rules, const RuleContext& ctx,
                    const SearchConfig& cfg)
{
    if (cfg.time_limit_ms <= 0 || cfg.max_obligations == 0 || cfg.max_depth <= 0)
        throw std::invalid_argument("search bounds must be positive");
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::milliseconds(cfg.time_limit_ms);

    Explorer ex{rules, ctx, cfg, {}, false, initial};
    Node root{initial, {}, {}};
    root.trace = close_equations(root.store, rules, ctx);
    root.priorities = priorities_of(root.trace, rules, {});

    Node found;
    Outcome3 outcome;
    if (cfg.prefer_shortest)
    {
        // leave a fifth of the budget for a first-found attempt
        const auto cutoff = start + std::chrono::milliseconds(cfg.time_limit_ms * 4 / 5);
        outcome = shortest(ex, root, {start, cutoff}, found);
        if (outcome == Outcome3::Timeout)
        {
            ex.stats.fell_back = true;
            outcome = first_found(ex, root, {start, deadline}, found);
        }
    }
    else
        outcome = first_found(ex, root, {start, deadline}, found);

    SearchResult r;
    r.stats = ex.stats;
    r.stats.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    if (outcome == Outcome3::Found)
    {
        r.proved = true;
        r.trace = std::move(found.trace);
        r.store = std::move(found.store);
        return r;
    }
    r.store = ex.best;
    if (outcome == Outcome3::Timeout)
    {
        r.failure = FailureKind::Timeout;
        r.reason = "time limit of " + std::to_string(cfg.time_limit_ms) + " ms exceeded";
    }
    else if (ex.bound_hit)
    {
        r.failure = FailureKind::Bound;
        r.reason = "no proof within " + std::to_string(cfg.max_obligations) + " obligations and depth " +
                   std::to_string(cfg.max_depth);
    }
    else
    {
        r.failure = FailureKind::Exhausted;
        r.reason = "no rule sequence closes the goal";
    }
    return r;
}

std::vector<std::string> verify_proof(const ObligationStore& store, bool allow_sorry, const OracleBounds& bounds)
{
    std::vector<std::string> problems;
    if (!store.root_done())
    {
        problems.push_back("root obligation is not closed");
        return problems;
    }

    // cycle check over all dependency edges
    const int n = store.next_id();
    std::vector<int> colour(static_cast<std::size_t>(n), 0);
    std::function<bool(int)> cyclic = [&](int id) {
        auto& c = colour[static_cast<std::size_t>(id)];
        if (c == 1)
            return true;
        if (c == 2)
            return false;
        c = 1;
        if (const auto* d = discharged(store.at(id)))
            for (int f : d->from)
                if (f < 0 || f >= n || cyclic(f))
                    return true;
        c = 2;
        return false;
    };
    for (int id = 0; id < n; ++id)
        if (cyclic(id))
        {
            problems.push_back("dependency cycle or dangling reference through obligation " + std::to_string(id));
            return problems;
        }

    // obligations resting on a sorry are not oracle-checked
    std::vector<bool> sorry(static_cast<std::size_t>(n), false);
    const std::vector<int> ids = reachable(store);
    for (int id : ids)
        sorry[static_cast<std::size_t>(id)] = std::holds_alternative<Residual>(store.at(id).status);
    for (bool changed = true; changed;)
    {
        changed = false;
        for (int id : ids)
            if (const auto* d = discharged(store.at(id)); d && !sorry[static_cast<std::size_t>(id)])
                for (int f : d->from)
                    if (sorry[static_cast<std::size_t>(f)])
                    {
                        sorry[static_cast<std::size_t>(id)] = changed = true;
                        break;
                    }
    }

    for (int id : ids)
    {
        const Obligation& o = store.at(id);
        const std::string where = "obligation " + std::to_string(id) + " ";
        if (o.todo())
        {
            problems.push_back(where + "is still open");
            continue;
        }
        if (const auto* r = std::get_if<Residual>(&o.status))
        {
            if (!allow_sorry)
                problems.push_back(where + "is a sorry (" + r->rule + ") but sorries are not allowed");
            continue;
        }
        const auto& d = std::get<Discharged>(o.status);
        if (!is_catalog_lemma(d.lemma))
            problems.push_back(where + "cites unknown lemma " + d.lemma);
        for (const auto& s : d.side)
            if (!is_catalog_lemma(s.lemma))
                problems.push_back(where + "cites unknown side lemma " + s.lemma);
        if (sorry[static_cast<std::size_t>(id)])
            continue;
        const Verdict v = validate_discharge(o, derive_bounds({o.lhs, o.rhs}, bounds));
        if (v.kind == Verdict::Kind::Counterexample)
            problems.push_back(where + "fails the oracle:\n" + describe(v));
    }
    return problems;
}

} // namespace refine

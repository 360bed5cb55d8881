#include "refine/semantics.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

namespace refine
{

Outcome Outcome::of(std::vector<StateGraph> states)
{
    std::map<std::string, StateGraph> unique;
    for (auto& s : states)
        unique.emplace(fingerprint(s), std::move(s));
    Outcome o;
    o.kind = unique.empty() ? Kind::Magic : Kind::Terminates;
    for (auto& [fp, s] : unique)
    {
        o.fingerprints.push_back(fp);
        o.states.push_back(std::move(s));
    }
    return o;
}

std::string to_string(Outcome::Kind k)
{
    switch (k)
    {
    case Outcome::Kind::Terminates:
        return "terminates";
    case Outcome::Kind::Abort:
        return "abort";
    case Outcome::Kind::Magic:
        return "magic";
    case Outcome::Kind::NonTermination:
        return "nontermination";
    }
    return "?";
}

// ------------------------------------------------------------------ evaluation

std::optional<std::int64_t> eval_int(const Expr& e, const StateGraph& g)
{
    return std::visit(
        [&](const auto& n) -> std::optional<std::int64_t> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntConst>)
                return n.value;
            else if constexpr (std::is_same_v<T, PathRef>)
            {
                const Vertex v = get_vertex_path(n.path, g);
                if (!v.is_leaf())
                    return std::nullopt;
                return v.value;
            }
            else
            {
                auto l = eval_int(*n.left, g);
                auto r = eval_int(*n.right, g);
                if (!l || !r)
                    return std::nullopt;
                std::int64_t out = 0;
                const bool overflow = std::is_same_v<T, Plus> ? __builtin_add_overflow(*l, *r, &out)
                                                               : __builtin_sub_overflow(*l, *r, &out);
                if (overflow)
                    return std::nullopt;
                return out;
            }
        },
        e.node);
}

std::optional<std::pair<Vertex, StateGraph>> eval_vertex(const Expr& e, const StateGraph& g)
{
    if (const auto* ref = std::get_if<PathRef>(&e.node))
    {
        const Vertex v = get_vertex_path(ref->path, g);
        if (v.is_undef() || v.is_root() || !is_good_path(ref->path, g))
            return std::nullopt;
        return std::make_pair(v, g);
    }
    auto value = eval_int(e, g);
    if (!value)
        return std::nullopt;
    return g.fresh_leaf(*value);
}

std::optional<bool> try_eval_bool(const BoolExpr& b, const StateGraph& g)
{
    return std::visit(
        [&](const auto& n) -> std::optional<bool> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TrueB>)
                return true;
            else if constexpr (std::is_same_v<T, FalseB>)
                return false;
            else if constexpr (std::is_same_v<T, Eq> || std::is_same_v<T, Lt>)
            {
                auto l = eval_int(n.left, g);
                auto r = eval_int(n.right, g);
                if (!l || !r)
                    return std::nullopt;
                if constexpr (std::is_same_v<T, Eq>)
                    return *l == *r;
                else
                    return *l < *r;
            }
            else if constexpr (std::is_same_v<T, Not>)
            {
                auto v = try_eval_bool(*n.operand, g);
                if (!v)
                    return std::nullopt;
                return !*v;
            }
            else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>)
            {
                auto l = try_eval_bool(*n.left, g);
                auto r = try_eval_bool(*n.right, g);
                if (!l || !r)
                    return std::nullopt;
                if constexpr (std::is_same_v<T, And>)
                    return *l && *r;
                else
                    return *l || *r;
            }
            else if constexpr (std::is_same_v<T, Alias>)
            {
                if (get_vertex_path(n.first, g).is_undef() || get_vertex_path(n.second, g).is_undef())
                    return std::nullopt;
                return alias(n.first, n.second, g);
            }
        },
        b.node);
}

bool eval_bool(const BoolExpr& b, const StateGraph& g) { return try_eval_bool(b, g).value_or(false); }

bool eval_post(const PostRel& r, const StateGraph& pre, const StateGraph& post)
{
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PostEq>)
            {
                const Vertex v = get_vertex_path(n.path, post);
                auto value = eval_int(n.rhs, pre);
                return v.is_leaf() && value && v.value == *value;
            }
            else if constexpr (std::is_same_v<T, PostAlias>)
                return alias(n.first, n.second, post);
            else if constexpr (std::is_same_v<T, RDisj>)
                return eval_post(*n.left, pre, post) || eval_post(*n.right, pre, post);
            else if constexpr (std::is_same_v<T, RConj>)
                return eval_post(*n.left, pre, post) && eval_post(*n.right, pre, post);
            else
                return true;
        },
        r.node);
}

namespace
{

void collect_post_rhs(const PostRel& r, std::vector<const Expr*>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PostEq>)
                out.push_back(&n.rhs);
            else if constexpr (std::is_same_v<T, RDisj> || std::is_same_v<T, RConj>)
            {
                collect_post_rhs(*n.left, out);
                collect_post_rhs(*n.right, out);
            }
        },
        r.node);
}

void collect_alias_pairs(const PostRel& r, std::vector<std::pair<Path, Path>>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PostAlias>)
                out.emplace_back(n.first, n.second);
            else if constexpr (std::is_same_v<T, RDisj> || std::is_same_v<T, RConj>)
            {
                collect_alias_pairs(*n.left, out);
                collect_alias_pairs(*n.right, out);
            }
        },
        r.node);
}

struct FrameOption
{
    enum class Kind
    {
        Keep,
        Leaf,
        Rewire
    } kind;
    std::int64_t value = 0;
    Vertex target;
};

} // namespace

std::vector<StateGraph> post_states(const PostRel& r, const StateGraph& pre, const SemanticsConfig& cfg)
{
    const std::vector<Path> paths = frame(r);

    std::set<std::int64_t> pool(cfg.values.begin(), cfg.values.end());
    std::vector<const Expr*> rhs;
    collect_post_rhs(r, rhs);
    for (const Expr* e : rhs)
        if (auto v = eval_int(*e, pre))
            pool.insert(*v);

    std::vector<std::pair<Path, Path>> alias_pairs;
    collect_alias_pairs(r, alias_pairs);

    std::vector<std::vector<FrameOption>> options;
    for (const auto& p : paths)
    {
        std::vector<FrameOption> opts{{FrameOption::Kind::Keep, 0, {}}};
        for (auto v : pool)
            opts.push_back({FrameOption::Kind::Leaf, v, {}});
        for (const auto& [a, b] : alias_pairs)
        {
            const Path* partner = a == p ? &b : (b == p ? &a : nullptr);
            if (!partner || *partner == p)
                continue;
            const Vertex t = get_vertex_path(*partner, pre);
            if (t.is_undef() || t.is_root())
                continue;
            opts.push_back({FrameOption::Kind::Rewire, 0, t});
        }
        options.push_back(std::move(opts));
    }

    std::vector<StateGraph> out;
    std::vector<std::size_t> choice(paths.size(), 0);
    while (true)
    {
        StateGraph g = pre;
        bool valid = true;
        for (std::size_t i = 0; i < paths.size() && valid; ++i)
        {
            const FrameOption& opt = options[i][choice[i]];
            if (opt.kind == FrameOption::Kind::Keep)
                continue;
            try
            {
                Vertex target = opt.target;
                if (opt.kind == FrameOption::Kind::Leaf)
                    std::tie(target, g) = g.fresh_leaf(opt.value);
                g = swing_path(paths[i], target, g);
            }
            catch (const GraphError&)
            {
                valid = false;
            }
        }
        if (valid && wf_graph(g) &&
            std::all_of(paths.begin(), paths.end(), [&](const Path& p) { return wf_path(p, g); }) &&
            eval_post(r, pre, g))
            out.push_back(std::move(g));

        std::size_t k = 0;
        while (k < choice.size() && ++choice[k] == options[k].size())
            choice[k++] = 0;
        if (k == choice.size())
            break;
    }
    return out;
}

StatePred pred_of(const BoolExpr& b)
{
    return [b](const StateGraph& g) { return eval_bool(b, g); };
}

// ------------------------------------------------------------------ wp

namespace
{

std::optional<StateGraph> begin_scope(const std::vector<Binding>& bindings, const StateGraph& u)
{
    StateGraph g = u;
    std::vector<std::pair<Label, Vertex>> bound;
    for (const auto& b : bindings)
    {
        // initial expressions are evaluated in the enclosing scope
        auto v = eval_vertex(b.init, g);
        if (!v)
            return std::nullopt;
        bound.emplace_back(b.label, v->first);
        g = v->second;
    }
    try
    {
        return vars(bound, g);
    }
    catch (const GraphError&)
    {
        return std::nullopt;
    }
}

// The precondition holds and every frame path can be swung.
bool pp_enabled(const BoolExpr& pre, const PostRel& post, const StateGraph& u)
{
    if (!wf_graph(u) || !eval_bool(pre, u))
        return false;
    const std::vector<Path> paths = frame(post);
    return std::all_of(paths.begin(), paths.end(), [&](const Path& p) { return wf_path(p, u); });
}

struct LoopWp : std::enable_shared_from_this<LoopWp>
{
    BoolExpr guard;
    Design body;
    StatePred q;
    SemanticsConfig cfg;

    bool at(const StateGraph& u, int iteration) const
    {
        if (!wf_graph(u))
            return false;
        auto b = try_eval_bool(guard, u);
        if (!b)
            return false;
        if (!*b)
            return q(u);
        if (iteration >= cfg.unroll_limit)
            throw LoopBoundExceeded();
        auto self = shared_from_this();
        return wp(body, [self, iteration](const StateGraph& v) { return self->at(v, iteration + 1); }, cfg)(u);
    }
};

} // namespace

StatePred wp(const Design& d, StatePred q, const SemanticsConfig& cfg)
{
    return std::visit(
        [&](const auto& n) -> StatePred {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SkipD>)
                return q;
            else if constexpr (std::is_same_v<T, ChaosD>)
                return [](const StateGraph&) { return false; };
            else if constexpr (std::is_same_v<T, AssertD>)
                return [c = n.cond, q](const StateGraph& u) { return eval_bool(c, u) && q(u); };
            else if constexpr (std::is_same_v<T, AssignD>)
                return [p = n.path, e = n.rhs, q](const StateGraph& u) {
                    if (!wf_graph(u) || !wf_path(p, u))
                        return false;
                    auto v = eval_vertex(e, u);
                    if (!v)
                        return false;
                    return q(swing_path(p, v->first, v->second));
                };
            else if constexpr (std::is_same_v<T, PP>)
                return [pre = n.pre, post = n.post, q, cfg](const StateGraph& u) {
                    if (!pp_enabled(pre, post, u))
                        return false;
                    for (const auto& v : post_states(post, u, cfg))
                        if (!q(v))
                            return false;
                    return true;
                };
            else if constexpr (std::is_same_v<T, Seq>)
                return wp(*n.first, wp(*n.second, q, cfg), cfg);
            else if constexpr (std::is_same_v<T, Choice>)
            {
                StatePred l = wp(*n.left, q, cfg);
                StatePred r = wp(*n.right, q, cfg);
                return [l, r](const StateGraph& u) { return l(u) && r(u); };
            }
            else if constexpr (std::is_same_v<T, Cond>)
            {
                StatePred t = wp(*n.then_branch, q, cfg);
                StatePred e = wp(*n.else_branch, q, cfg);
                return [g = n.guard, t, e](const StateGraph& u) {
                    auto b = try_eval_bool(g, u);
                    if (!b)
                        return false;
                    return *b ? t(u) : e(u);
                };
            }
            else if constexpr (std::is_same_v<T, Do>)
            {
                auto loop = std::make_shared<LoopWp>();
                loop->guard = n.guard;
                loop->body = *n.body;
                loop->q = q;
                loop->cfg = cfg;
                return [loop](const StateGraph& u) { return loop->at(u, 0); };
            }
            else if constexpr (std::is_same_v<T, Locdec> || std::is_same_v<T, MethodBlock>)
            {
                // begin f ; body ; end
                StatePred end_q = [q](const StateGraph& u) {
                    if (!wf_graph(u) || u.roots().size() < 2)
                        return false;
                    return q(remove_snode(u));
                };
                StatePred body_q = wp(*n.body, end_q, cfg);
                return [bindings = n.bindings, body_q](const StateGraph& u) {
                    if (!wf_graph(u))
                        return false;
                    auto g = begin_scope(bindings, u);
                    return g && body_q(*g);
                };
            }
        },
        d.node);
}

// ------------------------------------------------------------------ exec

namespace
{

// Runs `step` from every state of `o` and merges the results. Abort dominates
// non-termination.
template <class F>
Outcome bind(const Outcome& o, F&& step)
{
    if (!o.terminates())
        return o;
    bool aborted = false;
    bool diverged = false;
    std::vector<StateGraph> all;
    for (const auto& s : o.states)
    {
        Outcome next = step(s);
        if (next.kind == Outcome::Kind::Abort)
            aborted = true;
        else if (next.kind == Outcome::Kind::NonTermination)
            diverged = true;
        else
            all.insert(all.end(), next.states.begin(), next.states.end());
    }
    if (aborted)
        return Outcome::abort();
    if (diverged)
        return Outcome::nontermination();
    return Outcome::of(std::move(all));
}

} // namespace

Outcome exec(const Design& d, const StateGraph& g, const SemanticsConfig& cfg)
{
    return std::visit(
        [&](const auto& n) -> Outcome {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SkipD>)
                return Outcome::of({g});
            else if constexpr (std::is_same_v<T, ChaosD>)
                return Outcome::abort();
            else if constexpr (std::is_same_v<T, AssertD>)
                return eval_bool(n.cond, g) ? Outcome::of({g}) : Outcome::abort();
            else if constexpr (std::is_same_v<T, AssignD>)
            {
                if (!wf_graph(g) || !wf_path(n.path, g))
                    return Outcome::abort();
                auto v = eval_vertex(n.rhs, g);
                if (!v)
                    return Outcome::abort();
                return Outcome::of({swing_path(n.path, v->first, v->second)});
            }
            else if constexpr (std::is_same_v<T, PP>)
            {
                if (!pp_enabled(n.pre, n.post, g))
                    return Outcome::abort();
                return Outcome::of(post_states(n.post, g, cfg));
            }
            else if constexpr (std::is_same_v<T, Seq>)
                return bind(exec(*n.first, g, cfg), [&](const StateGraph& s) { return exec(*n.second, s, cfg); });
            else if constexpr (std::is_same_v<T, Choice>)
            {
                Outcome l = exec(*n.left, g, cfg);
                Outcome r = exec(*n.right, g, cfg);
                if (l.kind == Outcome::Kind::Abort || r.kind == Outcome::Kind::Abort)
                    return Outcome::abort();
                if (!l.terminates() || !r.terminates())
                    return Outcome::nontermination();
                std::vector<StateGraph> all = l.states;
                all.insert(all.end(), r.states.begin(), r.states.end());
                return Outcome::of(std::move(all));
            }
            else if constexpr (std::is_same_v<T, Cond>)
            {
                auto b = try_eval_bool(n.guard, g);
                if (!b)
                    return Outcome::abort();
                return exec(*b ? *n.then_branch : *n.else_branch, g, cfg);
            }
            else if constexpr (std::is_same_v<T, Do>)
            {
                std::vector<StateGraph> frontier{g};
                std::vector<StateGraph> done;
                bool diverged = false;
                for (int iteration = 0; !frontier.empty(); ++iteration)
                {
                    std::vector<StateGraph> next;
                    for (const auto& s : frontier)
                    {
                        if (!wf_graph(s))
                            return Outcome::abort();
                        auto b = try_eval_bool(n.guard, s);
                        if (!b)
                            return Outcome::abort();
                        if (!*b)
                        {
                            done.push_back(s);
                            continue;
                        }
                        if (iteration >= cfg.unroll_limit)
                        {
                            diverged = true;
                            continue;
                        }
                        Outcome o = exec(*n.body, s, cfg);
                        if (o.kind == Outcome::Kind::Abort)
                            return Outcome::abort();
                        if (o.kind == Outcome::Kind::NonTermination)
                            diverged = true;
                        else
                            next.insert(next.end(), o.states.begin(), o.states.end());
                    }
                    frontier = Outcome::of(std::move(next)).states;
                }
                if (diverged)
                    return Outcome::nontermination();
                return Outcome::of(std::move(done));
            }
            else if constexpr (std::is_same_v<T, Locdec> || std::is_same_v<T, MethodBlock>)
            {
                if (!wf_graph(g))
                    return Outcome::abort();
                auto entered = begin_scope(n.bindings, g);
                if (!entered)
                    return Outcome::abort();
                return bind(exec(*n.body, *entered, cfg), [](const StateGraph& s) {
                    if (!wf_graph(s) || s.roots().size() < 2)
                        return Outcome::abort();
                    return Outcome::of({remove_snode(s)});
                });
            }
        },
        d.node);
}

// ------------------------------------------------------------------ monotonicity

namespace
{

std::uint64_t fnv1a(const std::string& s, std::uint64_t salt)
{
    std::uint64_t h = 1469598103934665603ULL ^ salt;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return h;
}

} // namespace

MonotonicityReport is_monotonic_sampled(const Transformer& t, const std::vector<StateGraph>& graphs, int samples,
                                        std::uint64_t seed)
{
    std::uint64_t state = seed;
    auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };

    for (int i = 0; i < samples; ++i)
    {
        const std::uint64_t salt1 = next();
        const std::uint64_t salt2 = next();
        const std::uint64_t density = 2 + next() % 3;
        StatePred q1 = [salt1, density](const StateGraph& g) { return fnv1a(fingerprint(g), salt1) % density == 0; };
        StatePred q2 = [q1, salt2](const StateGraph& g) { return q1(g) || fnv1a(fingerprint(g), salt2) % 2 == 0; };
        StatePred w1 = t(q1);
        StatePred w2 = t(q2);
        for (const auto& g : graphs)
        {
            try
            {
                if (w1(g) && !w2(g))
                    return {false, "sample " + std::to_string(i) + ": t(q1) holds but t(q2) fails on\n" + dump(g)};
            }
            catch (const LoopBoundExceeded&)
            {
            }
        }
    }
    return {};
}

MonotonicityReport is_monotonic_sampled(const Design& d, const std::vector<StateGraph>& graphs, int samples,
                                        std::uint64_t seed, const SemanticsConfig& cfg)
{
    return is_monotonic_sampled([d, cfg](StatePred q) { return wp(d, std::move(q), cfg); }, graphs, samples, seed);
}

} // namespace refine

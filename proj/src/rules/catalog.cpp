#include "refine/rules.hpp"

#include <algorithm>
#include <set>

namespace refine
{

namespace
{

using Apps = std::vector<Application>;

Application make_app(int target, std::string detail, std::function<void(ObligationStore&)> effect)
{
    Application a;
    a.target = target;
    a.detail = std::move(detail);
    a.effect = std::move(effect);
    return a;
}

Application discharge(const Rule& r, int target, std::vector<int> from = {}, std::vector<SideFact> side = {},
                      std::vector<std::string> inst = {})
{
    std::string detail = r.name + " closes " + std::to_string(target);
    Discharged d{r.name, r.lemma, std::move(from), std::move(side), std::move(inst)};
    return make_app(target, detail, [target, d](ObligationStore& s) { s.set_status(target, d); });
}

// Adds the goals that are not in the store yet; nullopt when none is new.
std::optional<Application> generate(const Rule& r, const ObligationStore& store, int target,
                                    std::vector<std::pair<Design, Design>> goals)
{
    std::vector<std::pair<Design, Design>> fresh;
    for (auto& g : goals)
    {
        if (store.find(g.first, g.second))
            continue;
        if (std::find(fresh.begin(), fresh.end(), g) == fresh.end())
            fresh.push_back(std::move(g));
    }
    if (fresh.empty())
        return std::nullopt;
    std::string detail = r.name + " from " + std::to_string(target) + ":";
    for (const auto& [l, rr] : fresh)
        detail += " {" + render(l) + "} ~> {" + render(rr) + "}";
    return make_app(target, detail, [fresh](ObligationStore& s) {
        for (const auto& [l, rr] : fresh)
            if (!s.find(l, rr))
                s.add(l, rr);
    });
}

template <class F>
Apps for_each_todo(const ObligationStore& store, F&& f)
{
    Apps out;
    for (const auto& o : store.obligations())
        if (o.todo())
            f(o, out);
    return out;
}

// First closed obligation lhs ~> rhs, if any.
const Obligation* closed(const ObligationStore& store, const Design& lhs, const Design& rhs)
{
    const Obligation* o = store.find(lhs, rhs);
    return o && !o->todo() ? o : nullptr;
}

bool is_true(const BoolExpr& b) { return std::holds_alternative<TrueB>(b.node); }

std::set<Path> frame_set(const PostRel& r)
{
    const auto f = frame(r);
    return {f.begin(), f.end()};
}

// `p := k` with k an integer literal
std::optional<std::pair<Path, std::int64_t>> const_assign(const Design& d)
{
    const auto* a = d.as<AssignD>();
    if (!a)
        return std::nullopt;
    const auto* c = std::get_if<IntConst>(&a->rhs.node);
    if (!c)
        return std::nullopt;
    return std::make_pair(a->path, c->value);
}

// `p := n ; p := p + k` (or `p - k`) with literals n and k
struct AddShape
{
    Path path;
    std::int64_t n;
    std::int64_t k;
};

std::optional<AddShape> add_shape(const Design& d)
{
    const auto* s = d.as<Seq>();
    if (!s)
        return std::nullopt;
    auto first = const_assign(*s->first);
    const auto* second = s->second->as<AssignD>();
    if (!first || !second || second->path != first->first)
        return std::nullopt;
    const Expr self = path_ref(first->first);
    std::int64_t k = 0;
    if (const auto* p = std::get_if<Plus>(&second->rhs.node))
    {
        const auto* c = std::get_if<IntConst>(&p->right->node);
        if (!c || *p->left != self)
            return std::nullopt;
        k = c->value;
    }
    else if (const auto* m = std::get_if<Minus>(&second->rhs.node))
    {
        const auto* c = std::get_if<IntConst>(&m->right->node);
        if (!c || *m->left != self || c->value == INT64_MIN)
            return std::nullopt;
        k = -c->value;
    }
    else
        return std::nullopt;
    std::int64_t sum = 0;
    if (__builtin_add_overflow(first->second, k, &sum))
        return std::nullopt;
    return AddShape{first->first, first->second, k};
}

Design add_design(const Path& p, std::int64_t n, std::int64_t k)
{
    const Expr step = k < 0 ? minus(path_ref(p), int_const(-k)) : plus(path_ref(p), int_const(k));
    return seq(assign(p, int_const(n)), assign(p, step));
}

// method b = p, c = n ; b.a := c ; end
struct Setter
{
    Path receiver;
    Label field;
    Expr value;
};

std::optional<Setter> as_setter(const Design& d)
{
    const auto* mb = d.as<MethodBlock>();
    if (!mb || mb->bindings.size() != 2)
        return std::nullopt;
    const Binding& b = mb->bindings[0];
    const Binding& c = mb->bindings[1];
    if (b.label == c.label)
        return std::nullopt;
    const auto* recv = std::get_if<PathRef>(&b.init.node);
    if (!recv || recv->path.empty() || !std::holds_alternative<IntConst>(c.init.node))
        return std::nullopt;
    const auto* body = mb->body->as<AssignD>();
    if (!body || body->path.size() != 2 || body->path.head() != b.label)
        return std::nullopt;
    if (body->rhs != path_ref(Path::from_surface({c.label})))
        return std::nullopt;
    return Setter{recv->path, body->path.last(), c.init};
}

Design setter_design(const Path& receiver, const Label& field, const Expr& value)
{
    return method_block({{"this", path_ref(receiver)}, {"v", value}},
                        assign(Path::from_surface({"this", field}), path_ref(Path::from_surface({"v"}))));
}

void collect_setters(const Design& d, std::vector<Design>& out)
{
    if (as_setter(d))
    {
        if (std::find(out.begin(), out.end(), d) == out.end())
            out.push_back(d);
        return;
    }
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Seq>)
            {
                collect_setters(*n.first, out);
                collect_setters(*n.second, out);
            }
            else if constexpr (std::is_same_v<T, Choice>)
            {
                collect_setters(*n.left, out);
                collect_setters(*n.right, out);
            }
            else if constexpr (std::is_same_v<T, Cond>)
            {
                collect_setters(*n.then_branch, out);
                collect_setters(*n.else_branch, out);
            }
            else if constexpr (std::is_same_v<T, Do> || std::is_same_v<T, Locdec> || std::is_same_v<T, MethodBlock>)
                collect_setters(*n.body, out);
        },
        d.node);
}

Design replace_all(const Design& d, const Design& from, const Design& to)
{
    if (d == from)
        return to;
    return std::visit(
        [&](const auto& n) -> Design {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Seq>)
                return seq(replace_all(*n.first, from, to), replace_all(*n.second, from, to));
            else if constexpr (std::is_same_v<T, Choice>)
                return choice(replace_all(*n.left, from, to), replace_all(*n.right, from, to));
            else if constexpr (std::is_same_v<T, Cond>)
                return cond(n.guard, replace_all(*n.then_branch, from, to), replace_all(*n.else_branch, from, to));
            else if constexpr (std::is_same_v<T, Do>)
                return do_loop(n.guard, replace_all(*n.body, from, to));
            else if constexpr (std::is_same_v<T, Locdec>)
                return locdec(n.bindings, replace_all(*n.body, from, to));
            else if constexpr (std::is_same_v<T, MethodBlock>)
                return method_block(n.bindings, replace_all(*n.body, from, to));
            else
                return d;
        },
        d.node);
}

// The spec form needs e defined wherever the update is, so it only takes
// path-free values.
bool mentions_path(const Expr& e)
{
    if (std::holds_alternative<PathRef>(e.node))
        return true;
    if (const auto* p = std::get_if<Plus>(&e.node))
        return mentions_path(*p->left) || mentions_path(*p->right);
    if (const auto* m = std::get_if<Minus>(&e.node))
        return mentions_path(*m->left) || mentions_path(*m->right);
    return false;
}

bool mentions_alias(const BoolExpr& q, const Path& p1, const Path& p2)
{
    if (const auto* a = std::get_if<Alias>(&q.node))
        return (a->first == p1 && a->second == p2) || (a->first == p2 && a->second == p1);
    if (const auto* a = std::get_if<And>(&q.node))
        return mentions_alias(*a->left, p1, p2) || mentions_alias(*a->right, p1, p2);
    return false;
}

// ------------------------------------------------------------------ matchers

Apps match_reflexive(const Rule& r, const ObligationStore& store, bool root)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        if ((o.id == store.root_id()) == root && o.lhs == o.rhs)
            out.push_back(discharge(r, o.id));
    });
}

Apps match_sequential(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* l = o.lhs.as<Seq>();
        const auto* rr = o.rhs.as<Seq>();
        if (!l || !rr)
            return;
        const Obligation* a = closed(store, *l->first, *rr->first);
        const Obligation* b = closed(store, *l->second, *rr->second);
        if (a && b)
            out.push_back(discharge(r, o.id, {a->id, b->id}, {{monotonic_lemma(*l->first), *l->first}}));
    });
}

Apps match_sequential_gen(const Rule& r, const ObligationStore& store, bool first)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* l = o.lhs.as<Seq>();
        const auto* rr = o.rhs.as<Seq>();
        if (!l || !rr)
            return;
        auto goal = first ? std::make_pair(*l->first, *rr->first) : std::make_pair(*l->second, *rr->second);
        if (auto a = generate(r, store, o.id, {goal}))
            out.push_back(std::move(*a));
    });
}

Apps match_transitive(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        for (const auto& a : store.obligations())
        {
            if (a.todo() || a.id == o.id || a.lhs != o.lhs)
                continue;
            const Obligation* b = closed(store, a.rhs, o.rhs);
            if (b && b->id != o.id)
            {
                out.push_back(discharge(r, o.id, {a.id, b->id}));
                return;
            }
        }
    });
}

Apps match_transitive_gen(const Rule& r, const ObligationStore& store, bool left)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        // only a proved step is extended
        for (const auto& m : store.obligations())
        {
            if (m.id == o.id || m.todo())
                continue;
            if (left && m.rhs == o.rhs && m.lhs != o.lhs)
            {
                if (auto a = generate(r, store, o.id, {{o.lhs, m.lhs}}))
                    out.push_back(std::move(*a));
            }
            else if (!left && m.lhs == o.lhs && m.rhs != o.rhs)
            {
                if (auto a = generate(r, store, o.id, {{m.rhs, o.rhs}}))
                    out.push_back(std::move(*a));
            }
        }
    });
}

Apps match_pp_assign(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* spec = o.lhs.as<PP>();
        const auto target = const_assign(o.rhs);
        if (!spec || !target || !is_true(spec->pre))
            return;
        if (spec->post == post_eq(target->first, int_const(target->second)))
            out.push_back(discharge(r, o.id));
    });
}

Apps match_pp_assign_gen(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* spec = o.lhs.as<PP>();
        const auto target = const_assign(o.rhs);
        if (!spec || !target || frame_set(spec->post).count(target->first) == 0)
            return;
        const Design exact = pp(spec->pre, post_eq(target->first, int_const(target->second)));
        if (exact == o.lhs)
            return;
        if (auto a = generate(r, store, o.id, {{o.lhs, exact}}))
            out.push_back(std::move(*a));
    });
}

Apps match_disj(const Rule& r, const ObligationStore& store, bool left)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* l = o.lhs.as<PP>();
        const auto* rr = o.rhs.as<PP>();
        if (!l || !rr || l->pre != rr->pre)
            return;
        const auto* d = std::get_if<RDisj>(&l->post.node);
        if (!d)
            return;
        const PostRel& pick = left ? *d->left : *d->right;
        if (pick == rr->post && frame_set(pick) == frame_set(l->post))
            out.push_back(discharge(r, o.id));
    });
}

Apps match_add(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto target = const_assign(o.lhs);
        const auto shape = add_shape(o.rhs);
        if (!target || !shape || shape->path != target->first || shape->n + shape->k != target->second)
            return;
        out.push_back(discharge(r, o.id, {}, {},
                                {to_string(shape->path), std::to_string(target->second), std::to_string(shape->n)}));
    });
}

Apps match_add_gen(const Rule& r, const ObligationStore& store, const RuleContext& ctx)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        std::vector<std::pair<Design, Design>> goals;
        if (const auto shape = add_shape(o.rhs))
            goals.emplace_back(assign(shape->path, int_const(shape->n + shape->k)), o.rhs);
        if (const auto target = const_assign(o.lhs))
            for (auto n : ctx.constants)
            {
                std::int64_t k = 0;
                if (n == target->second || __builtin_sub_overflow(target->second, n, &k) || k == INT64_MIN)
                    continue;
                goals.emplace_back(o.lhs, add_design(target->first, n, k));
            }
        for (auto& g : goals)
            if (auto a = generate(r, store, o.id, {g}))
                out.push_back(std::move(*a));
    });
}

Apps match_mcall(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* a = o.lhs.as<AssignD>();
        const auto s = as_setter(o.rhs);
        if (!a || !s || a->path != s->receiver.extend(s->field) || a->rhs != s->value)
            return;
        out.push_back(discharge(r, o.id));
    });
}

Apps match_mcall_gen(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        std::vector<Design> setters;
        collect_setters(o.rhs, setters);
        for (const auto& f : setters)
        {
            const auto s = as_setter(f);
            const Design e = assign(s->receiver.extend(s->field), s->value);
            if (auto a = generate(r, store, o.id, {{replace_all(o.rhs, f, e), o.rhs}}))
                out.push_back(std::move(*a));
        }
    });
}

// Owners are plain variables here: a longer owner path can alias the other
// one while its update path is not good.
Apps match_alias_assign(const Rule& r, const ObligationStore& store, const RuleContext&)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        // [q |- p1.f' = e] ~> p2.f := e
        if (const auto* spec = o.lhs.as<PP>())
        {
            const auto* eq = std::get_if<PostEq>(&spec->post.node);
            const auto* a = o.rhs.as<AssignD>();
            if (!eq || !a || eq->path.size() < 2 || a->path.size() < 2)
                return;
            if (eq->path.last() != a->path.last() || eq->rhs != a->rhs || mentions_path(a->rhs) ||
                eq->path.size() != 2 || a->path.size() != 2)
                return;
            if (mentions_alias(spec->pre, eq->path.owner(), a->path.owner()))
                out.push_back(discharge(r, o.id));
            return;
        }
        // assert q ; p1.f := e ~> assert q ; p2.f := e
        const auto* l = o.lhs.as<Seq>();
        const auto* rr = o.rhs.as<Seq>();
        if (!l || !rr || !(*l->first == *rr->first))
            return;
        const auto* q = l->first->as<AssertD>();
        const auto* a1 = l->second->as<AssignD>();
        const auto* a2 = rr->second->as<AssignD>();
        if (!q || !a1 || !a2 || a1->path.size() != 2 || a2->path.size() != 2)
            return;
        if (a1->path.last() == a2->path.last() && a1->rhs == a2->rhs &&
            mentions_alias(q->cond, a1->path.owner(), a2->path.owner()))
            out.push_back(discharge(r, o.id));
    });
}

Apps match_cond(const Rule& r, const ObligationStore& store, bool gen)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* l = o.lhs.as<Cond>();
        const auto* rr = o.rhs.as<Cond>();
        if (!l || !rr || l->guard != rr->guard)
            return;
        if (gen)
        {
            if (auto a = generate(r, store, o.id,
                                  {{*l->then_branch, *rr->then_branch}, {*l->else_branch, *rr->else_branch}}))
                out.push_back(std::move(*a));
            return;
        }
        const Obligation* t = closed(store, *l->then_branch, *rr->then_branch);
        const Obligation* e = closed(store, *l->else_branch, *rr->else_branch);
        if (t && e)
            out.push_back(discharge(r, o.id, {t->id, e->id}));
    });
}

Apps match_do(const Rule& r, const ObligationStore& store, bool gen)
{
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* l = o.lhs.as<Do>();
        const auto* rr = o.rhs.as<Do>();
        if (!l || !rr || l->guard != rr->guard)
            return;
        if (gen)
        {
            if (auto a = generate(r, store, o.id, {{*l->body, *rr->body}}))
                out.push_back(std::move(*a));
            return;
        }
        if (const Obligation* b = closed(store, *l->body, *rr->body))
            out.push_back(discharge(r, o.id, {b->id}));
    });
}

Apps match_strengthen(const Rule& r, const ObligationStore& store, const RuleContext& ctx)
{
    if (!ctx.allow_sorry)
        return {};
    // targets some other rule can work on
    std::set<int> busy;
    for (const auto& other : builtin_rules())
        if (other.name != r.name)
            for (const auto& a : other.matcher(other, store, ctx))
                busy.insert(a.target);
    return for_each_todo(store, [&](const Obligation& o, Apps& out) {
        const auto* l = o.lhs.as<PP>();
        const auto* rr = o.rhs.as<PP>();
        if (!l || !rr || l->pre != rr->pre || l->post == rr->post || busy.count(o.id))
            return;
        const auto lf = frame_set(l->post);
        const auto rf = frame_set(rr->post);
        if (!std::includes(lf.begin(), lf.end(), rf.begin(), rf.end()))
            return;
        const int target = o.id;
        const Residual residual{r.name, rr->post, l->post};
        const Discharged closed_by{r.name, r.lemma, {}, {}, {}};
        out.push_back(make_app(target, r.name + " closes " + std::to_string(target) + " leaving a sorry",
                               [target, residual, closed_by, o](ObligationStore& s) {
                                   Discharged d = closed_by;
                                   d.from = {s.add(o.lhs, o.rhs, residual)};
                                   s.set_status(target, d);
                               }));
    });
}

// ------------------------------------------------------------------ samplers

struct Pick
{
    std::mt19937_64& rng;
    std::int64_t value() { return static_cast<std::int64_t>(rng() % 4); }
    Path field_path() { return Path::parse(rng() % 2 ? "a.x" : "b.x"); }
    Path receiver() { return Path::parse(rng() % 2 ? "a" : "b"); }
    BoolExpr pre()
    {
        switch (rng() % 3)
        {
        case 0:
            return b_true();
        case 1:
            return parse_bool("a.x < 2");
        default:
            return parse_bool("!(b.x = 0)");
        }
    }
};

// A refinement that holds by one of the simple lemmas.
std::pair<Design, Design> base_pair(std::mt19937_64& rng)
{
    Pick pick{rng};
    const Path p = pick.field_path();
    const std::int64_t n = pick.value();
    const std::int64_t m = pick.value();
    switch (rng() % 5)
    {
    case 0:
        return {assign(p, int_const(n)), assign(p, int_const(n))};
    case 1:
        return {pp(b_true(), post_eq(p, int_const(n))), assign(p, int_const(n))};
    case 2:
        return {pp(b_true(), r_disj(post_eq(p, int_const(n)), post_eq(p, int_const(m)))),
                pp(b_true(), post_eq(p, int_const(n)))};
    case 3:
        return {assign(p, int_const(m)), add_design(p, n, m - n)};
    default:
    {
        const Path recv = pick.receiver();
        return {assign(recv.extend("x"), int_const(n)), setter_design(recv, "x", int_const(n))};
    }
    }
}

std::optional<Sample> sample_reflexive(std::mt19937_64& rng)
{
    const auto [l, r] = base_pair(rng);
    const Design d = rng() % 2 ? l : r;
    return Sample{d, d, {}};
}

std::optional<Sample> sample_pp_assign(std::mt19937_64& rng)
{
    Pick pick{rng};
    const Path p = pick.field_path();
    const std::int64_t n = pick.value();
    return Sample{pp(b_true(), post_eq(p, int_const(n))), assign(p, int_const(n)), {}};
}

std::optional<Sample> sample_disj(std::mt19937_64& rng, bool left)
{
    Pick pick{rng};
    const Path p = pick.field_path();
    const BoolExpr pre = pick.pre();
    const PostRel e1 = post_eq(p, int_const(pick.value()));
    const PostRel e2 = rng() % 2 ? post_eq(p, int_const(pick.value())) : post_eq(p, plus(path_ref(p), int_const(1)));
    return Sample{pp(pre, r_disj(e1, e2)), pp(pre, left ? e1 : e2), {}};
}

std::optional<Sample> sample_add(std::mt19937_64& rng)
{
    Pick pick{rng};
    const Path p = pick.field_path();
    const std::int64_t m = pick.value();
    const std::int64_t n = pick.value();
    return Sample{assign(p, int_const(m)), add_design(p, n, m - n), {}};
}

std::optional<Sample> sample_mcall(std::mt19937_64& rng)
{
    Pick pick{rng};
    const Path recv = pick.receiver();
    const std::int64_t n = pick.value();
    return Sample{assign(recv.extend("x"), int_const(n)), setter_design(recv, "x", int_const(n)), {}};
}

std::optional<Sample> sample_alias(std::mt19937_64& rng)
{
    Pick pick{rng};
    const Expr k = int_const(pick.value());
    const Expr e = rng() % 2 ? k : plus(path_ref(Path::parse("a.x")), int_const(1));
    BoolExpr q = b_alias(Path::parse("a"), Path::parse("b"));
    if (rng() % 2)
        q = b_and(q, pick.pre());
    if (rng() % 2)
        return Sample{pp(q, post_eq(Path::parse("a.x"), k)), assign(Path::parse("b.x"), k), {}};
    return Sample{seq(assert_d(q), assign(Path::parse("a.x"), e)), seq(assert_d(q), assign(Path::parse("b.x"), e)), {}};
}

std::optional<Sample> sample_sequential(std::mt19937_64& rng)
{
    const auto a = base_pair(rng);
    const auto b = base_pair(rng);
    return Sample{seq(a.first, b.first), seq(a.second, b.second), {a, b}};
}

std::optional<Sample> sample_transitive(std::mt19937_64& rng)
{
    Pick pick{rng};
    const Path p = pick.field_path();
    const std::int64_t n = pick.value();
    const std::int64_t m = pick.value();
    const Design spec = pp(b_true(), r_disj(post_eq(p, int_const(n)), post_eq(p, int_const(m))));
    const Design exact = pp(b_true(), post_eq(p, int_const(n)));
    const Design code = assign(p, int_const(n));
    switch (rng() % 3)
    {
    case 0:
        return Sample{spec, code, {{spec, exact}, {exact, code}}};
    case 1:
    {
        const Design split = add_design(p, m, n - m);
        return Sample{exact, split, {{exact, code}, {code, split}}};
    }
    default:
    {
        // premises chosen at random; the conclusion must hold whenever they do
        const auto x = base_pair(rng);
        const auto y = base_pair(rng);
        return Sample{x.first, y.second, {{x.first, x.second}, {x.second, y.second}}};
    }
    }
}

std::optional<Sample> sample_cond(std::mt19937_64& rng)
{
    const auto a = base_pair(rng);
    const auto b = base_pair(rng);
    const BoolExpr g = rng() % 2 ? parse_bool("a.x < 2") : parse_bool("alias(a, b)");
    return Sample{cond(g, a.first, b.first), cond(g, a.second, b.second), {a, b}};
}

std::optional<Sample> sample_do(std::mt19937_64& rng)
{
    const Path p = Path::parse("a.x");
    const Expr inc = plus(path_ref(p), int_const(1));
    std::pair<Design, Design> body;
    switch (rng() % 3)
    {
    case 0:
        body = {pp(b_true(), post_eq(p, inc)), assign(p, inc)};
        break;
    case 1:
        body = {pp(b_true(), r_disj(post_eq(p, inc), post_eq(p, plus(path_ref(p), int_const(2))))),
                assign(p, inc)};
        break;
    default:
        body = {assign(p, inc), assign(p, inc)};
        break;
    }
    const BoolExpr g = parse_bool("a.x < 2");
    return Sample{do_loop(g, body.first), do_loop(g, body.second), {body}};
}

// ------------------------------------------------------------------ catalog

std::vector<Rule> make_catalog()
{
    std::vector<Rule> rules;
    auto add = [&](std::string name, RuleKind kind, std::string lemma, std::string group, std::string summary,
                   std::function<Apps(const Rule&, const ObligationStore&, const RuleContext&)> matcher,
                   std::function<std::optional<Sample>(std::mt19937_64&)> sampler = {}) {
        Rule r;
        r.name = std::move(name);
        r.kind = kind;
        r.lemma = std::move(lemma);
        r.group = std::move(group);
        r.summary = std::move(summary);
        r.priority = static_cast<int>(rules.size());
        r.matcher = std::move(matcher);
        r.sampler = std::move(sampler);
        rules.push_back(std::move(r));
    };
    using K = RuleKind;

    add("ref-reflexive", K::Equation, "ref_reflexive", "core", "{X} ~> {X} for the root goal",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_reflexive(r, s, true); },
        sample_reflexive);
    add("is-ident", K::Equation, "ref_reflexive", "core", "{X} ~> {X} for a generated goal",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_reflexive(r, s, false); },
        sample_reflexive);
    add("ref-mcall-gen", K::Generate, "EPIsRefTwo", "oo",
        "goal with a setter call F in R: add {R[F := p.a := n]} ~> {R}", match_mcall_gen);
    add("ref-sequential-gen1", K::Generate, "seq_ref", "core", "{S1 ; S2} ~> {S3 ; S4}: add {S1} ~> {S3}",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_sequential_gen(r, s, true); });
    add("ref-sequential-gen2", K::Generate, "seq_ref", "core", "{S1 ; S2} ~> {S3 ; S4}: add {S2} ~> {S4}",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_sequential_gen(r, s, false); });
    add("ref-mcall", K::Discharge, "EPIsRefTwo", "oo", "{p.a := n} ~> {method b = p, c = n ; b.a := c ; end}",
        match_mcall, sample_mcall);
    add("ref-sequential", K::Discharge, "seq_ref", "core", "{S1 ; S2} ~> {S3 ; S4} from S1 ~> S3 and S2 ~> S4",
        match_sequential, sample_sequential);
    add("ref-add-gen", K::Generate, "assign_end", "assign",
        "add {p := n + k} ~> {p := n ; p := p + k}, or split p := m at a task constant", match_add_gen);
    add("ref-add", K::Discharge, "assign_end", "assign", "{p := m} ~> {p := n ; p := p + (m - n)}", match_add,
        sample_add);
    add("ref-pp-assign", K::Generate, "ref_pp_assign", "assign",
        "goal {[pre |- R]} ~> {p := n}: add {[pre |- R]} ~> {[pre |- p' = n]}", match_pp_assign_gen);
    add("ref-pp-assign", K::Discharge, "ref_pp_assign", "assign", "{[true |- p' = n]} ~> {p := n}",
        match_pp_assign, sample_pp_assign);
    add("ref-disj-left", K::Discharge, "ref_disj_left", "assign", "{[P |- E1 \\/ E2]} ~> {[P |- E1]}",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_disj(r, s, true); },
        [](std::mt19937_64& rng) { return sample_disj(rng, true); });
    add("ref-disj-right", K::Discharge, "ref_disj_right", "assign", "{[P |- E1 \\/ E2]} ~> {[P |- E2]}",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_disj(r, s, false); },
        [](std::mt19937_64& rng) { return sample_disj(rng, false); });
    add("ref-alias-assign", K::Discharge, "aliasPreservesAssertAssign", "alias",
        "under alias(p1, p2): {[q |- p1.a' = e]} ~> {p2.a := e}", match_alias_assign, sample_alias);
    add("cond-congruence-gen", K::Generate, "cond_ref", "congruence",
        "{if b then L1 else L2 fi} ~> {if b then R1 else R2 fi}: add the branch goals",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_cond(r, s, true); });
    add("cond-congruence", K::Discharge, "cond_ref", "congruence", "conditional from both branch refinements",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_cond(r, s, false); },
        sample_cond);
    add("do-congruence-gen", K::Generate, "do_ref", "congruence",
        "{do b -> L od} ~> {do b -> R od}: add {L} ~> {R}",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_do(r, s, true); });
    add("do-congruence", K::Discharge, "do_ref", "congruence", "loop from its body refinement",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_do(r, s, false); },
        sample_do);
    add("ref-transitive", K::Discharge, "ref_transitive", "core", "{L} ~> {R} from L ~> M and M ~> R",
        match_transitive, sample_transitive);
    add("ref-transitive-gen-left", K::Generate, "ref_transitive", "core",
        "goal {L} ~> {R} and a proved {M} ~> {R}: add {L} ~> {M}",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_transitive_gen(r, s, true); });
    add("ref-transitive-gen-right", K::Generate, "ref_transitive", "core",
        "goal {L} ~> {R} and a proved {L} ~> {M}: add {M} ~> {R}",
        [](const Rule& r, const ObligationStore& s, const RuleContext&) { return match_transitive_gen(r, s, false); });
    add("ref-strengthen", K::GenerateDischarge, "ref_strengthen", "sorry",
        "{[P |- R1]} ~> {[P |- R2]} leaving R2 ==> R1 as a sorry", match_strengthen);
    return rules;
}

} // namespace

const std::vector<Rule>& builtin_rules()
{
    static const std::vector<Rule> catalog = make_catalog();
    return catalog;
}

std::vector<std::string> rule_groups()
{
    std::vector<std::string> out;
    for (const auto& r : builtin_rules())
        if (std::find(out.begin(), out.end(), r.group) == out.end())
            out.push_back(r.group);
    return out;
}

std::vector<const Rule*> select_rules(const std::vector<std::string>& groups)
{
    const auto known = rule_groups();
    for (const auto& g : groups)
        if (std::find(known.begin(), known.end(), g) == known.end())
            throw std::invalid_argument("unknown rule group '" + g + "'");
    std::vector<const Rule*> out;
    for (const auto& r : builtin_rules())
        if (groups.empty() || std::find(groups.begin(), groups.end(), r.group) != groups.end())
            out.push_back(&r);
    return out;
}

const Rule* find_rule(const std::string& name)
{
    for (const auto& r : builtin_rules())
        if (r.name == name)
            return &r;
    return nullptr;
}

std::string monotonic_lemma(const Design& d)
{
    static const char* names[] = {"pp",     "assign", "seq",  "cond",   "do",    "locdec",
                                  "method", "skip",   "chaos", "choice", "assert"};
    return std::string(names[d.node.index()]) + "_monotonic";
}

bool is_catalog_lemma(const std::string& lemma)
{
    for (const auto& r : builtin_rules())
        if (r.lemma == lemma)
            return true;
    const std::string suffix = "_monotonic";
    if (lemma.size() > suffix.size() && lemma.compare(lemma.size() - suffix.size(), suffix.size(), suffix) == 0)
    {
        const std::string kind = lemma.substr(0, lemma.size() - suffix.size());
        for (const char* k : {"pp", "assign", "seq", "cond", "do", "locdec", "method", "skip", "chaos", "choice",
                              "assert"})
            if (kind == k)
                return true;
    }
    return false;
}

const Rule& corrupted_rule_fixture()
{
    static const Rule fixture = [] {
        Rule r;
        r.name = "ref-pp-assign-corrupted";
        r.kind = RuleKind::Discharge;
        r.lemma = "ref_pp_assign";
        r.group = "fixture";
        r.summary = "{[true |- p' = n]} ~> {p := n + 1} (unsound on purpose)";
        r.priority = 1000;
        r.matcher = [](const Rule& self, const ObligationStore& store, const RuleContext&) {
            return for_each_todo(store, [&](const Obligation& o, Apps& out) {
                const auto* spec = o.lhs.as<PP>();
                const auto target = const_assign(o.rhs);
                if (spec && target && is_true(spec->pre) &&
                    spec->post == post_eq(target->first, int_const(target->second - 1)))
                    out.push_back(discharge(self, o.id));
            });
        };
        r.sampler = [](std::mt19937_64& rng) -> std::optional<Sample> {
            Pick pick{rng};
            const Path p = pick.field_path();
            const std::int64_t n = pick.value();
            return Sample{pp(b_true(), post_eq(p, int_const(n))), assign(p, int_const(n + 1)), {}};
        };
        return r;
    }();
    return fixture;
}

} // namespace refine

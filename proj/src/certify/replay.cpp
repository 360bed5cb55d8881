// Witness replay. Knows the lemma statements only, not the rules that
// produced the witness.

#include "refine/certify.hpp"

#include <map>
#include <set>

namespace refine
{

namespace
{

const char* constructor_name(const Design& d)
{
    static const char* names[] = {"pp",     "assign", "seq",   "cond",   "do",    "locdec",
                                  "method", "skip",   "chaos", "choice", "assert"};
    return names[d.node.index()];
}

struct Statement
{
    bool monotonic = false;
    Design lhs;
    Design rhs;
};

class Replayer
{
public:
    explicit Replayer(const ProofWitness& w) : w_(w) {}

    std::vector<std::string> run()
    {
        for (const auto& s : w_.sorries)
            if (!sorries_.emplace(s.name, &s).second)
                fail("duplicate sorry name " + s.name);
        for (const auto& f : w_.facts)
        {
            if (facts_.count(f.name) || sorries_.count(f.name))
                fail("duplicate fact name " + f.name);
            const std::size_t before = problems_.size();
            check(f);
            if (problems_.size() == before)
                facts_[f.name] = Statement{f.kind == WitnessFact::Kind::Monotonic, f.lhs, f.rhs};
        }
        if (w_.facts.empty())
            fail("no facts");
        else
        {
            const WitnessFact& last = w_.facts.back();
            if (last.kind != WitnessFact::Kind::Refines || !(last.lhs == w_.goal_lhs) || !(last.rhs == w_.goal_rhs))
                fail("the last fact " + last.name + " is not the goal");
        }
        return problems_;
    }

private:
    const ProofWitness& w_;
    std::map<std::string, Statement> facts_;
    std::map<std::string, const WitnessSorry*> sorries_;
    std::vector<std::string> problems_;

    void fail(const std::string& msg) { problems_.push_back(msg); }

    // the refinement proved by an earlier fact
    const Statement* premise(const WitnessFact& f, std::size_t i)
    {
        if (i >= f.from.size())
            return nullptr;
        auto it = facts_.find(f.from[i]);
        return it == facts_.end() ? nullptr : &it->second;
    }

    void check(const WitnessFact& f)
    {
        const std::string who = f.name + " (" + f.lemma + "): ";
        for (const auto& n : f.from)
            if (!facts_.count(n) && !sorries_.count(n))
                fail(who + "refers to " + n + " before it is established");

        if (f.kind == WitnessFact::Kind::Monotonic)
        {
            if (f.lemma != std::string(constructor_name(f.lhs)) + "_monotonic" || !f.from.empty())
                fail(who + "does not state monotonicity of a matching construct");
            return;
        }

        const std::string& l = f.lemma;
        bool ok = false;
        if (l == "ref_reflexive")
            ok = f.from.empty() && f.lhs == f.rhs;
        else if (l == "ref_pp_assign")
            ok = f.from.empty() && pp_assign(f.lhs, f.rhs);
        else if (l == "ref_disj_left" || l == "ref_disj_right")
            ok = f.from.empty() && disj(f.lhs, f.rhs, l == "ref_disj_left");
        else if (l == "assign_end")
            ok = f.from.empty() && assign_end(f);
        else if (l == "EPIsRefTwo")
            ok = f.from.empty() && setter(f.lhs, f.rhs);
        else if (l == "aliasPreservesAssertAssign")
            ok = f.from.empty() && alias_assign(f.lhs, f.rhs);
        else if (l == "seq_ref")
            ok = seq_ref(f);
        else if (l == "ref_transitive")
            ok = transitive(f);
        else if (l == "cond_ref")
            ok = cond_ref(f);
        else if (l == "do_ref")
            ok = do_ref(f);
        else if (l == "ref_strengthen")
            ok = strengthen(f);
        else
        {
            fail(who + "unknown lemma");
            return;
        }
        if (!ok)
            fail(who + "statement does not follow from the lemma");
    }

    static bool pp_assign(const Design& lhs, const Design& rhs)
    {
        const auto* s = lhs.as<PP>();
        const auto* a = rhs.as<AssignD>();
        if (!s || !a || !std::holds_alternative<TrueB>(s->pre.node) ||
            !std::holds_alternative<IntConst>(a->rhs.node))
            return false;
        return s->post == post_eq(a->path, a->rhs);
    }

    static std::set<Path> frame_of(const PostRel& r)
    {
        const auto f = frame(r);
        return {f.begin(), f.end()};
    }

    static bool disj(const Design& lhs, const Design& rhs, bool left)
    {
        const auto* a = lhs.as<PP>();
        const auto* b = rhs.as<PP>();
        if (!a || !b || !(a->pre == b->pre))
            return false;
        const auto* d = std::get_if<RDisj>(&a->post.node);
        if (!d)
            return false;
        const PostRel& kept = left ? *d->left : *d->right;
        return kept == b->post && frame_of(kept) == frame_of(a->post);
    }

    // p := m  ref  p := n ; p := p + (m - n), instantiated [of p m n]
    static bool assign_end(const WitnessFact& f)
    {
        if (f.inst.size() != 3)
            return false;
        try
        {
            const std::string& p = f.inst[0];
            const long long m = std::stoll(f.inst[1]);
            const long long n = std::stoll(f.inst[2]);
            const long long k = m - n;
            const std::string step = k < 0 ? p + " - " + std::to_string(-k) : p + " + " + std::to_string(k);
            return f.lhs == parse_design(p + " := " + std::to_string(m)) &&
                   f.rhs == parse_design(p + " := " + std::to_string(n) + " ; " + p + " := " + step);
        }
        catch (const std::exception&)
        {
            return false;
        }
    }

    // p.a := n  ref  method b = p, c = n ; b.a := c ; end
    static bool setter(const Design& lhs, const Design& rhs)
    {
        const auto* a = lhs.as<AssignD>();
        const auto* m = rhs.as<MethodBlock>();
        if (!a || !m || m->bindings.size() != 2 || a->path.size() < 2)
            return false;
        const Binding& b = m->bindings[0];
        const Binding& c = m->bindings[1];
        if (b.label == c.label || !(b.init == path_ref(a->path.owner())) || !(c.init == a->rhs) ||
            !std::holds_alternative<IntConst>(a->rhs.node))
            return false;
        return *m->body == assign(Path::from_surface({b.label, a->path.last()}),
                                  path_ref(Path::from_surface({c.label})));
    }

    static bool has_alias(const BoolExpr& q, const Path& x, const Path& y)
    {
        if (const auto* a = std::get_if<Alias>(&q.node))
            return (a->first == x && a->second == y) || (a->first == y && a->second == x);
        if (const auto* a = std::get_if<And>(&q.node))
            return has_alias(*a->left, x, y) || has_alias(*a->right, x, y);
        return false;
    }

    static bool constant(const Expr& e)
    {
        if (std::holds_alternative<IntConst>(e.node))
            return true;
        if (const auto* p = std::get_if<Plus>(&e.node))
            return constant(*p->left) && constant(*p->right);
        if (const auto* m = std::get_if<Minus>(&e.node))
            return constant(*m->left) && constant(*m->right);
        return false;
    }

    static bool alias_assign(const Design& lhs, const Design& rhs)
    {
        if (const auto* s = lhs.as<PP>())
        {
            const auto* eq = std::get_if<PostEq>(&s->post.node);
            const auto* a = rhs.as<AssignD>();
            return eq && a && eq->path.size() == 2 && a->path.size() == 2 && eq->path.last() == a->path.last() &&
                   eq->rhs == a->rhs && constant(a->rhs) &&
                   has_alias(s->pre, eq->path.owner(), a->path.owner());
        }
        const auto* l = lhs.as<Seq>();
        const auto* r = rhs.as<Seq>();
        if (!l || !r || !(*l->first == *r->first))
            return false;
        const auto* q = l->first->as<AssertD>();
        const auto* a1 = l->second->as<AssignD>();
        const auto* a2 = r->second->as<AssignD>();
        return q && a1 && a2 && a1->path.size() == 2 && a2->path.size() == 2 &&
               a1->path.last() == a2->path.last() && a1->rhs == a2->rhs &&
               has_alias(q->cond, a1->path.owner(), a2->path.owner());
    }

    bool refines(const Statement* s, const Design& l, const Design& r) const
    {
        return s && !s->monotonic && s->lhs == l && s->rhs == r;
    }

    bool seq_ref(const WitnessFact& f)
    {
        const auto* l = f.lhs.as<Seq>();
        const auto* r = f.rhs.as<Seq>();
        if (!l || !r || f.from.size() != 3)
            return false;
        const Statement* mono = premise(f, 2);
        return refines(premise(f, 0), *l->first, *r->first) && refines(premise(f, 1), *l->second, *r->second) &&
               mono && mono->monotonic && mono->lhs == *l->first;
    }

    bool transitive(const WitnessFact& f)
    {
        if (f.from.size() != 2)
            return false;
        const Statement* a = premise(f, 0);
        const Statement* b = premise(f, 1);
        if (!a || !b || a->monotonic || b->monotonic || !(a->lhs == f.lhs) || !(b->rhs == f.rhs) ||
            !(a->rhs == b->lhs))
            return false;
        return f.of.empty() || f.of == std::vector<Design>{f.lhs, a->rhs, f.rhs};
    }

    bool cond_ref(const WitnessFact& f)
    {
        const auto* l = f.lhs.as<Cond>();
        const auto* r = f.rhs.as<Cond>();
        return l && r && f.from.size() == 2 && l->guard == r->guard &&
               refines(premise(f, 0), *l->then_branch, *r->then_branch) &&
               refines(premise(f, 1), *l->else_branch, *r->else_branch);
    }

    bool do_ref(const WitnessFact& f)
    {
        const auto* l = f.lhs.as<Do>();
        const auto* r = f.rhs.as<Do>();
        return l && r && f.from.size() == 1 && l->guard == r->guard && refines(premise(f, 0), *l->body, *r->body);
    }

    bool strengthen(const WitnessFact& f)
    {
        const auto* l = f.lhs.as<PP>();
        const auto* r = f.rhs.as<PP>();
        if (!l || !r || f.from.size() != 1 || !(l->pre == r->pre))
            return false;
        auto it = sorries_.find(f.from[0]);
        return it != sorries_.end() && it->second->premise == r->post && it->second->conclusion == l->post;
    }
};

} // namespace

std::vector<std::string> replay(const ProofWitness& w) { return Replayer(w).run(); }

} // namespace refine

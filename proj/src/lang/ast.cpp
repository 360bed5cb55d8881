#include "refine/lang.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace refine
{

namespace
{

const std::set<std::string>& keywords()
{
    static const std::set<std::string> words = {
        "skip", "chaos", "assert", "if",   "then",  "else", "fi",   "do",     "od",
        "var",  "method", "end",   "true", "false", "alias", "task", "methods", "lhs",
        "rhs",  "rules",
    };
    return words;
}

} // namespace

bool is_keyword(const std::string& text) { return keywords().count(text) != 0; }

bool is_valid_label(const std::string& text)
{
    if (text.empty() || is_keyword(text))
        return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(text.front()))
        return false;
    return std::all_of(text.begin(), text.end(), [&](char c) { return alpha(c) || digit(c); });
}

Path Path::from_surface(const std::vector<Label>& surface)
{
    Path p;
    p.labels.assign(surface.rbegin(), surface.rend());
    return p;
}

Path Path::parse(const std::string& dotted)
{
    std::vector<Label> parts;
    if (!dotted.empty())
    {
        std::stringstream ss(dotted);
        std::string part;
        while (std::getline(ss, part, '.'))
        {
            if (!is_valid_label(part))
                throw std::invalid_argument("invalid label '" + part + "' in path '" + dotted + "'");
            parts.push_back(part);
        }
    }
    return from_surface(parts);
}

std::vector<Label> Path::surface() const { return {labels.rbegin(), labels.rend()}; }

Path Path::owner() const
{
    Path p;
    if (!labels.empty())
        p.labels.assign(labels.begin() + 1, labels.end());
    return p;
}

Path Path::extend(const Label& field) const
{
    Path p;
    p.labels.reserve(labels.size() + 1);
    p.labels.push_back(field);
    p.labels.insert(p.labels.end(), labels.begin(), labels.end());
    return p;
}

Path Path::prefix(std::size_t length) const
{
    Path p;
    length = std::min(length, labels.size());
    p.labels.assign(labels.end() - static_cast<std::ptrdiff_t>(length), labels.end());
    return p;
}

std::string to_string(const Path& p)
{
    std::string out;
    for (auto it = p.labels.rbegin(); it != p.labels.rend(); ++it)
    {
        if (!out.empty())
            out += '.';
        out += *it;
    }
    return out;
}

Expr int_const(std::int64_t v) { return Expr{IntConst{v}}; }
Expr path_ref(Path p) { return Expr{PathRef{std::move(p)}}; }
Expr plus(Expr l, Expr r) { return Expr{Plus{std::move(l), std::move(r)}}; }
Expr minus(Expr l, Expr r) { return Expr{Minus{std::move(l), std::move(r)}}; }

BoolExpr b_true() { return BoolExpr{TrueB{}}; }
BoolExpr b_false() { return BoolExpr{FalseB{}}; }
BoolExpr b_eq(Expr l, Expr r) { return BoolExpr{Eq{std::move(l), std::move(r)}}; }
BoolExpr b_lt(Expr l, Expr r) { return BoolExpr{Lt{std::move(l), std::move(r)}}; }
BoolExpr b_not(BoolExpr b) { return BoolExpr{Not{std::move(b)}}; }
BoolExpr b_and(BoolExpr l, BoolExpr r) { return BoolExpr{And{std::move(l), std::move(r)}}; }
BoolExpr b_or(BoolExpr l, BoolExpr r) { return BoolExpr{Or{std::move(l), std::move(r)}}; }
BoolExpr b_alias(Path p, Path q) { return BoolExpr{Alias{std::move(p), std::move(q)}}; }

PostRel post_eq(Path p, Expr e) { return PostRel{PostEq{std::move(p), std::move(e)}}; }
PostRel post_alias(Path p, Path q) { return PostRel{PostAlias{std::move(p), std::move(q)}}; }
PostRel r_disj(PostRel l, PostRel r) { return PostRel{RDisj{std::move(l), std::move(r)}}; }
PostRel r_conj(PostRel l, PostRel r) { return PostRel{RConj{std::move(l), std::move(r)}}; }
PostRel r_true() { return PostRel{RTrue{}}; }

Design pp(BoolExpr pre, PostRel post) { return Design{PP{std::move(pre), std::move(post)}}; }
Design assign(Path p, Expr e) { return Design{AssignD{std::move(p), std::move(e)}}; }
Design seq(Design a, Design b) { return Design{Seq{std::move(a), std::move(b)}}; }
Design cond(BoolExpr guard, Design t, Design e) { return Design{Cond{std::move(guard), std::move(t), std::move(e)}}; }
Design do_loop(BoolExpr guard, Design body) { return Design{Do{std::move(guard), std::move(body)}}; }
Design locdec(std::vector<Binding> bindings, Design body)
{
    return Design{Locdec{std::move(bindings), std::move(body)}};
}
Design method_block(std::vector<Binding> bindings, Design body)
{
    return Design{MethodBlock{std::move(bindings), std::move(body)}};
}
Design skip() { return Design{SkipD{}}; }
Design chaos() { return Design{ChaosD{}}; }
Design choice(Design a, Design b) { return Design{Choice{std::move(a), std::move(b)}}; }
Design assert_d(BoolExpr b) { return Design{AssertD{std::move(b)}}; }

namespace
{

void push_unique(std::vector<Path>& out, const Path& p)
{
    if (std::find(out.begin(), out.end(), p) == out.end())
        out.push_back(p);
}

void frame_into(const PostRel& r, std::vector<Path>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PostEq>)
                push_unique(out, n.path);
            else if constexpr (std::is_same_v<T, PostAlias>)
            {
                push_unique(out, n.first);
                push_unique(out, n.second);
            }
            else if constexpr (std::is_same_v<T, RDisj> || std::is_same_v<T, RConj>)
            {
                frame_into(*n.left, out);
                frame_into(*n.right, out);
            }
        },
        r.node);
}

// Generic path walk. `visit(path, bound)` is called for every path occurrence
// with the set of locally bound labels in scope.
template <class F>
void walk_expr(const Expr& e, const std::set<Label>& bound, F& visit)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PathRef>)
                visit(n.path, bound);
            else if constexpr (std::is_same_v<T, Plus> || std::is_same_v<T, Minus>)
            {
                walk_expr(*n.left, bound, visit);
                walk_expr(*n.right, bound, visit);
            }
        },
        e.node);
}

template <class F>
void walk_bool(const BoolExpr& b, const std::set<Label>& bound, F& visit)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Eq> || std::is_same_v<T, Lt>)
            {
                walk_expr(n.left, bound, visit);
                walk_expr(n.right, bound, visit);
            }
            else if constexpr (std::is_same_v<T, Not>)
                walk_bool(*n.operand, bound, visit);
            else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>)
            {
                walk_bool(*n.left, bound, visit);
                walk_bool(*n.right, bound, visit);
            }
            else if constexpr (std::is_same_v<T, Alias>)
            {
                visit(n.first, bound);
                visit(n.second, bound);
            }
        },
        b.node);
}

template <class F>
void walk_post(const PostRel& r, const std::set<Label>& bound, F& visit)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PostEq>)
            {
                visit(n.path, bound);
                walk_expr(n.rhs, bound, visit);
            }
            else if constexpr (std::is_same_v<T, PostAlias>)
            {
                visit(n.first, bound);
                visit(n.second, bound);
            }
            else if constexpr (std::is_same_v<T, RDisj> || std::is_same_v<T, RConj>)
            {
                walk_post(*n.left, bound, visit);
                walk_post(*n.right, bound, visit);
            }
        },
        r.node);
}

template <class F>
void walk_design(const Design& d, const std::set<Label>& bound, F& visit)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PP>)
            {
                walk_bool(n.pre, bound, visit);
                walk_post(n.post, bound, visit);
            }
            else if constexpr (std::is_same_v<T, AssignD>)
            {
                visit(n.path, bound);
                walk_expr(n.rhs, bound, visit);
            }
            else if constexpr (std::is_same_v<T, Seq>)
            {
                walk_design(*n.first, bound, visit);
                walk_design(*n.second, bound, visit);
            }
            else if constexpr (std::is_same_v<T, Choice>)
            {
                walk_design(*n.left, bound, visit);
                walk_design(*n.right, bound, visit);
            }
            else if constexpr (std::is_same_v<T, Cond>)
            {
                walk_bool(n.guard, bound, visit);
                walk_design(*n.then_branch, bound, visit);
                walk_design(*n.else_branch, bound, visit);
            }
            else if constexpr (std::is_same_v<T, Do>)
            {
                walk_bool(n.guard, bound, visit);
                walk_design(*n.body, bound, visit);
            }
            else if constexpr (std::is_same_v<T, Locdec> || std::is_same_v<T, MethodBlock>)
            {
                std::set<Label> inner = bound;
                for (const auto& b : n.bindings)
                {
                    walk_expr(b.init, bound, visit);
                    inner.insert(b.label);
                }
                walk_design(*n.body, inner, visit);
            }
            else if constexpr (std::is_same_v<T, AssertD>)
                walk_bool(n.cond, bound, visit);
        },
        d.node);
}

} // namespace

std::vector<Path> frame(const PostRel& r)
{
    std::vector<Path> out;
    frame_into(r, out);
    return out;
}

std::vector<Path> free_paths(const Design& d)
{
    std::vector<Path> out;
    auto visit = [&](const Path& p, const std::set<Label>& bound) {
        if (!p.empty() && bound.count(p.head()) == 0)
            push_unique(out, p);
    };
    walk_design(d, {}, visit);
    return out;
}

void collect_labels(const Design& d, std::vector<Label>& vars, std::vector<Label>& fields)
{
    auto add = [](std::vector<Label>& v, const Label& l) {
        if (std::find(v.begin(), v.end(), l) == v.end())
            v.push_back(l);
    };
    auto visit = [&](const Path& p, const std::set<Label>& bound) {
        if (p.empty())
            return;
        if (bound.count(p.head()) == 0)
            add(vars, p.head());
        for (std::size_t i = 0; i + 1 < p.labels.size(); ++i)
            add(fields, p.labels[i]);
    };
    walk_design(d, {}, visit);
}

namespace
{

void constants_expr(const Expr& e, std::vector<std::int64_t>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntConst>)
                out.push_back(n.value);
            else if constexpr (std::is_same_v<T, Plus> || std::is_same_v<T, Minus>)
            {
                constants_expr(*n.left, out);
                constants_expr(*n.right, out);
            }
        },
        e.node);
}

void constants_bool(const BoolExpr& b, std::vector<std::int64_t>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Eq> || std::is_same_v<T, Lt>)
            {
                constants_expr(n.left, out);
                constants_expr(n.right, out);
            }
            else if constexpr (std::is_same_v<T, Not>)
                constants_bool(*n.operand, out);
            else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>)
            {
                constants_bool(*n.left, out);
                constants_bool(*n.right, out);
            }
        },
        b.node);
}

void constants_post(const PostRel& r, std::vector<std::int64_t>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PostEq>)
                constants_expr(n.rhs, out);
            else if constexpr (std::is_same_v<T, RDisj> || std::is_same_v<T, RConj>)
            {
                constants_post(*n.left, out);
                constants_post(*n.right, out);
            }
        },
        r.node);
}

void constants_design(const Design& d, std::vector<std::int64_t>& out)
{
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PP>)
            {
                constants_bool(n.pre, out);
                constants_post(n.post, out);
            }
            else if constexpr (std::is_same_v<T, AssignD>)
                constants_expr(n.rhs, out);
            else if constexpr (std::is_same_v<T, Seq>)
            {
                constants_design(*n.first, out);
                constants_design(*n.second, out);
            }
            else if constexpr (std::is_same_v<T, Choice>)
            {
                constants_design(*n.left, out);
                constants_design(*n.right, out);
            }
            else if constexpr (std::is_same_v<T, Cond>)
            {
                constants_bool(n.guard, out);
                constants_design(*n.then_branch, out);
                constants_design(*n.else_branch, out);
            }
            else if constexpr (std::is_same_v<T, Do>)
            {
                constants_bool(n.guard, out);
                constants_design(*n.body, out);
            }
            else if constexpr (std::is_same_v<T, Locdec> || std::is_same_v<T, MethodBlock>)
            {
                for (const auto& b : n.bindings)
                    constants_expr(b.init, out);
                constants_design(*n.body, out);
            }
            else if constexpr (std::is_same_v<T, AssertD>)
                constants_bool(n.cond, out);
        },
        d.node);
}

} // namespace

std::vector<std::int64_t> constants(const Design& d)
{
    std::vector<std::int64_t> out;
    constants_design(d, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::pair<std::pair<Label, Label>, const MethodDef*> MethodTable::resolve(const Label& method) const
{
    const std::pair<Label, Label>* found_key = nullptr;
    const MethodDef* found = nullptr;
    for (const auto& [key, def] : entries)
    {
        if (key.second != method)
            continue;
        if (found)
            throw CallError("ambiguous method '" + method + "' (defined in " + found_key->first + " and " +
                            key.first + ")");
        found_key = &key;
        found = &def;
    }
    if (!found)
        throw CallError("unknown method '" + method + "'");
    return {*found_key, found};
}

Design desugar_call(const Path& receiver, const std::pair<Label, Label>& method, const std::vector<Expr>& actuals,
                    const std::optional<Path>& out, const MethodTable& table)
{
    auto it = table.entries.find(method);
    if (it == table.entries.end())
        throw CallError("unknown method '" + method.first + "::" + method.second + "'");
    const MethodDef& def = it->second;
    if (actuals.size() + 1 != def.formals.size())
        throw CallError("arity mismatch calling '" + method.first + "::" + method.second + "': expected " +
                        std::to_string(def.formals.size() - 1) + " argument(s), got " +
                        std::to_string(actuals.size()));
    if (out && !def.ret)
        throw CallError("method '" + method.first + "::" + method.second + "' has no return parameter");

    std::vector<Binding> bindings;
    bindings.push_back({def.formals[0], path_ref(receiver)});
    for (std::size_t i = 0; i < actuals.size(); ++i)
        bindings.push_back({def.formals[i + 1], actuals[i]});

    Design body = def.body;
    if (def.ret)
    {
        bindings.push_back({*def.ret, int_const(0)});
        if (out)
        {
            for (const auto& b : bindings)
                if (b.label == out->head())
                    throw CallError("return target '" + to_string(*out) + "' is shadowed by formal '" + b.label +
                                    "'");
            body = seq(body, assign(*out, path_ref(Path::from_surface({*def.ret}))));
        }
    }
    return method_block(std::move(bindings), std::move(body));
}

} // namespace refine

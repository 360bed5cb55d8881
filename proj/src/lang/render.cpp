#include "refine/lang.hpp"

namespace refine
{

namespace
{

bool is_arith(const Expr& e) { return std::holds_alternative<Plus>(e.node) || std::holds_alternative<Minus>(e.node); }

std::string paren(const std::string& s) { return "(" + s + ")"; }

std::string render_bindings(const std::vector<Binding>& bindings)
{
    std::string out;
    for (const auto& b : bindings)
    {
        if (!out.empty())
            out += ", ";
        out += b.label + " = " + render(b.init);
    }
    return out;
}

// Precedence levels used to decide on parentheses.
int bool_level(const BoolExpr& b)
{
    if (std::holds_alternative<Or>(b.node))
        return 0;
    if (std::holds_alternative<And>(b.node))
        return 1;
    return 2;
}

int post_level(const PostRel& r)
{
    if (std::holds_alternative<RDisj>(r.node))
        return 0;
    if (std::holds_alternative<RConj>(r.node))
        return 1;
    return 2;
}

} // namespace

std::string render(const Expr& e)
{
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntConst>)
                return std::to_string(n.value);
            else if constexpr (std::is_same_v<T, PathRef>)
                return to_string(n.path);
            else
            {
                const char* op = std::is_same_v<T, Plus> ? " + " : " - ";
                std::string right = render(*n.right);
                if (is_arith(*n.right))
                    right = paren(right);
                return render(*n.left) + op + right;
            }
        },
        e.node);
}

std::string render(const BoolExpr& b)
{
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TrueB>)
                return "true";
            else if constexpr (std::is_same_v<T, FalseB>)
                return "false";
            else if constexpr (std::is_same_v<T, Eq>)
                return render(n.left) + " = " + render(n.right);
            else if constexpr (std::is_same_v<T, Lt>)
                return render(n.left) + " < " + render(n.right);
            else if constexpr (std::is_same_v<T, Not>)
            {
                std::string inner = render(*n.operand);
                if (bool_level(*n.operand) < 2 || std::holds_alternative<Eq>(n.operand->node) ||
                    std::holds_alternative<Lt>(n.operand->node))
                    inner = paren(inner);
                return "!" + inner;
            }
            else if constexpr (std::is_same_v<T, Alias>)
                return "alias(" + to_string(n.first) + ", " + to_string(n.second) + ")";
            else
            {
                const int level = std::is_same_v<T, Or> ? 0 : 1;
                const char* op = std::is_same_v<T, Or> ? " \\/ " : " /\\ ";
                std::string left = render(*n.left);
                std::string right = render(*n.right);
                if (bool_level(*n.left) < level)
                    left = paren(left);
                if (bool_level(*n.right) <= level)
                    right = paren(right);
                return left + op + right;
            }
        },
        b.node);
}

std::string render(const PostRel& r)
{
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PostEq>)
                return to_string(n.path) + "' = " + render(n.rhs);
            else if constexpr (std::is_same_v<T, PostAlias>)
                return "alias(" + to_string(n.first) + ", " + to_string(n.second) + ")";
            else if constexpr (std::is_same_v<T, RTrue>)
                return "true";
            else
            {
                const int level = std::is_same_v<T, RDisj> ? 0 : 1;
                const char* op = std::is_same_v<T, RDisj> ? " \\/ " : " /\\ ";
                std::string left = render(*n.left);
                std::string right = render(*n.right);
                if (post_level(*n.left) < level)
                    left = paren(left);
                if (post_level(*n.right) <= level)
                    right = paren(right);
                return left + op + right;
            }
        },
        r.node);
}

std::string render(const Design& d)
{
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, PP>)
                return "[" + render(n.pre) + " |- " + render(n.post) + "]";
            else if constexpr (std::is_same_v<T, AssignD>)
                return to_string(n.path) + " := " + render(n.rhs);
            else if constexpr (std::is_same_v<T, Seq>)
            {
                std::string first = render(*n.first);
                if (std::holds_alternative<Seq>(n.first->node))
                    first = paren(first);
                return first + " ; " + render(*n.second);
            }
            else if constexpr (std::is_same_v<T, Choice>)
            {
                std::string left = render(*n.left);
                std::string right = render(*n.right);
                if (std::holds_alternative<Seq>(n.left->node) || std::holds_alternative<Choice>(n.left->node))
                    left = paren(left);
                if (std::holds_alternative<Seq>(n.right->node))
                    right = paren(right);
                return left + " |~| " + right;
            }
            else if constexpr (std::is_same_v<T, Cond>)
                return "if " + render(n.guard) + " then " + render(*n.then_branch) + " else " +
                       render(*n.else_branch) + " fi";
            else if constexpr (std::is_same_v<T, Do>)
                return "do " + render(n.guard) + " -> " + render(*n.body) + " od";
            else if constexpr (std::is_same_v<T, Locdec>)
                return "var " + render_bindings(n.bindings) + " ; " + render(*n.body) + " ; end";
            else if constexpr (std::is_same_v<T, MethodBlock>)
                return "method " + render_bindings(n.bindings) + " ; " + render(*n.body) + " ; end";
            else if constexpr (std::is_same_v<T, SkipD>)
                return "skip";
            else if constexpr (std::is_same_v<T, ChaosD>)
                return "chaos";
            else if constexpr (std::is_same_v<T, AssertD>)
            {
                std::string c = render(n.cond);
                // keep `assert b ; ...` unambiguous when b is a disjunction etc.
                if (bool_level(n.cond) < 2)
                    c = paren(c);
                return "assert " + c;
            }
        },
        d.node);
}

} // namespace refine

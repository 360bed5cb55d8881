#include "refine/lang.hpp"

#include <cctype>
#include <set>

namespace refine
{

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line),
      column_(column)
{
}

namespace
{

enum class Tok
{
    Ident,
    Int,
    Sym,
    End
};

struct Token
{
    Tok kind;
    std::string text;
    int line;
    int column;
};

std::vector<Token> lex(const std::string& src)
{
    static const char* const multi[] = {"|~|", ":=", "|-", "\\/", "/\\", "->", "::"};
    static const std::string single = "'.,;()[]{}=<+-!";

    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i)
        {
            if (src[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
    };

    while (i < src.size())
    {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c)))
        {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/'))
        {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
        {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Tok::Ident, src.substr(i, j - i), line, col});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
        {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            out.push_back({Tok::Int, src.substr(i, j - i), line, col});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (const char* m : multi)
        {
            const std::string sym(m);
            if (src.compare(i, sym.size(), sym) == 0)
            {
                out.push_back({Tok::Sym, sym, line, col});
                advance(sym.size());
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        if (single.find(c) != std::string::npos)
        {
            out.push_back({Tok::Sym, std::string(1, c), line, col});
            advance(1);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser
{
public:
    Parser(const std::string& text, const MethodTable* table) : toks_(lex(text)), table_(table) {}

    RefinementTask task();
    Design design_eof()
    {
        Design d = design();
        expect_end();
        return d;
    }
    Expr expr_eof()
    {
        Expr e = expr();
        expect_end();
        return e;
    }
    BoolExpr bool_eof()
    {
        BoolExpr b = bexpr();
        expect_end();
        return b;
    }
    PostRel post_eof()
    {
        PostRel r = prel();
        expect_end();
        return r;
    }

private:
    const Token& peek(std::size_t ahead = 0) const
    {
        const std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[k];
    }
    bool is_sym(const std::string& s, std::size_t ahead = 0) const
    {
        const Token& t = peek(ahead);
        return t.kind == Tok::Sym && t.text == s;
    }
    bool is_kw(const std::string& s, std::size_t ahead = 0) const
    {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == s;
    }
    [[noreturn]] void fail(const std::string& msg) const
    {
        const Token& t = peek();
        const std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + ", found " + found, t.line, t.column);
    }
    void expect_sym(const std::string& s)
    {
        if (!is_sym(s))
            fail("expected '" + s + "'");
        ++pos_;
    }
    void expect_kw(const std::string& s)
    {
        if (!is_kw(s))
            fail("expected '" + s + "'");
        ++pos_;
    }
    void expect_end()
    {
        if (peek().kind != Tok::End)
            fail("unexpected trailing input");
    }

    Label label()
    {
        const Token& t = peek();
        if (t.kind != Tok::Ident || is_keyword(t.text))
            fail("expected identifier");
        ++pos_;
        return t.text;
    }

    Path path()
    {
        std::vector<Label> parts{label()};
        while (is_sym(".") && peek(1).kind == Tok::Ident && !is_keyword(peek(1).text))
        {
            ++pos_;
            parts.push_back(label());
        }
        return Path::from_surface(parts);
    }

    void reject_prime()
    {
        if (is_sym("'"))
            fail("primed path is only allowed in the postcondition of a [pre |- post] block");
    }

    std::int64_t integer(bool negative)
    {
        const Token& t = peek();
        if (t.kind != Tok::Int)
            fail("expected integer");
        ++pos_;
        try
        {
            const std::string text = negative ? "-" + t.text : t.text;
            return std::stoll(text);
        }
        catch (const std::out_of_range&)
        {
            throw ParseError("integer literal out of range", t.line, t.column);
        }
    }

    // ------------------------------------------------------------ expressions

    Expr term()
    {
        if (peek().kind == Tok::Int)
            return int_const(integer(false));
        if (is_sym("-") && peek(1).kind == Tok::Int)
        {
            ++pos_;
            return int_const(integer(true));
        }
        if (is_sym("("))
        {
            ++pos_;
            Expr e = expr();
            expect_sym(")");
            return e;
        }
        if (peek().kind == Tok::Ident && !is_keyword(peek().text))
        {
            Path p = path();
            reject_prime();
            return path_ref(std::move(p));
        }
        fail("expected expression");
    }

    Expr expr()
    {
        Expr e = term();
        while (is_sym("+") || is_sym("-"))
        {
            const bool add = is_sym("+");
            ++pos_;
            Expr r = term();
            e = add ? plus(std::move(e), std::move(r)) : minus(std::move(e), std::move(r));
        }
        return e;
    }

    // ------------------------------------------------------------ guards

    BoolExpr comparison()
    {
        Expr l = expr();
        if (is_sym("="))
        {
            ++pos_;
            return b_eq(std::move(l), expr());
        }
        if (is_sym("<"))
        {
            ++pos_;
            return b_lt(std::move(l), expr());
        }
        fail("expected '=' or '<'");
    }

    BoolExpr batom()
    {
        if (is_kw("true"))
        {
            ++pos_;
            return b_true();
        }
        if (is_kw("false"))
        {
            ++pos_;
            return b_false();
        }
        if (is_kw("alias"))
        {
            ++pos_;
            expect_sym("(");
            Path p = path();
            expect_sym(",");
            Path q = path();
            expect_sym(")");
            return b_alias(std::move(p), std::move(q));
        }
        if (is_sym("("))
        {
            // Either a parenthesised guard or a comparison starting with a
            // parenthesised expression.
            const std::size_t save = pos_;
            try
            {
                ++pos_;
                BoolExpr b = bexpr();
                expect_sym(")");
                if (!is_sym("=") && !is_sym("<") && !is_sym("+") && !is_sym("-"))
                    return b;
            }
            catch (const ParseError&)
            {
            }
            pos_ = save;
        }
        return comparison();
    }

    BoolExpr bunary()
    {
        if (is_sym("!"))
        {
            ++pos_;
            return b_not(bunary());
        }
        return batom();
    }

    BoolExpr bconj()
    {
        BoolExpr b = bunary();
        while (is_sym("/\\"))
        {
            ++pos_;
            b = b_and(std::move(b), bunary());
        }
        return b;
    }

    BoolExpr bexpr()
    {
        BoolExpr b = bconj();
        while (is_sym("\\/"))
        {
            ++pos_;
            b = b_or(std::move(b), bconj());
        }
        return b;
    }

    // ------------------------------------------------------------ postconditions

    PostRel patom()
    {
        if (is_kw("true"))
        {
            ++pos_;
            return r_true();
        }
        if (is_kw("alias"))
        {
            ++pos_;
            expect_sym("(");
            Path p = path();
            expect_sym(",");
            Path q = path();
            expect_sym(")");
            return post_alias(std::move(p), std::move(q));
        }
        if (is_sym("("))
        {
            ++pos_;
            PostRel r = prel();
            expect_sym(")");
            return r;
        }
        Path p = path();
        if (!is_sym("'"))
            fail("expected primed path (p' = e) in postcondition");
        ++pos_;
        expect_sym("=");
        return post_eq(std::move(p), expr());
    }

    PostRel pconj()
    {
        PostRel r = patom();
        while (is_sym("/\\"))
        {
            ++pos_;
            r = r_conj(std::move(r), patom());
        }
        return r;
    }

    PostRel prel()
    {
        PostRel r = pconj();
        while (is_sym("\\/"))
        {
            ++pos_;
            r = r_disj(std::move(r), pconj());
        }
        return r;
    }

    // ------------------------------------------------------------ designs

    std::vector<Binding> bindings()
    {
        std::vector<Binding> out;
        std::set<Label> seen;
        do
        {
            if (!out.empty())
                ++pos_;
            const Token& at = peek();
            Label l = label();
            if (!seen.insert(l).second)
                throw ParseError("duplicate binding '" + l + "'", at.line, at.column);
            expect_sym("=");
            out.push_back({l, expr()});
        } while (is_sym(","));
        return out;
    }

    Design call_or_assign()
    {
        const Token& at = peek();
        Path p = path();
        reject_prime();
        if (is_sym(":="))
        {
            ++pos_;
            return assign(std::move(p), expr());
        }
        if (is_sym("("))
        {
            ++pos_;
            if (p.size() < 2)
                throw ParseError("method call needs a receiver path", at.line, at.column);
            std::vector<Expr> actuals;
            std::optional<Path> out;
            if (!is_sym(")") && !is_sym(";"))
            {
                actuals.push_back(expr());
                while (is_sym(","))
                {
                    ++pos_;
                    actuals.push_back(expr());
                }
            }
            if (is_sym(";"))
            {
                ++pos_;
                out = path();
            }
            expect_sym(")");
            if (!table_)
                throw ParseError("method call without a method table", at.line, at.column);
            try
            {
                auto [key, def] = table_->resolve(p.last());
                (void)def;
                return desugar_call(p.owner(), key, actuals, out, *table_);
            }
            catch (const CallError& e)
            {
                throw ParseError(e.what(), at.line, at.column);
            }
        }
        fail("expected ':=' or method call");
    }

    Design atom()
    {
        if (is_sym("["))
        {
            ++pos_;
            BoolExpr pre = is_sym("|-") ? b_true() : bexpr();
            expect_sym("|-");
            PostRel post = prel();
            expect_sym("]");
            return pp(std::move(pre), std::move(post));
        }
        if (is_sym("("))
        {
            ++pos_;
            Design d = design();
            expect_sym(")");
            return d;
        }
        if (is_kw("skip"))
        {
            ++pos_;
            return skip();
        }
        if (is_kw("chaos"))
        {
            ++pos_;
            return chaos();
        }
        if (is_kw("assert"))
        {
            ++pos_;
            return assert_d(bexpr());
        }
        if (is_kw("if"))
        {
            ++pos_;
            BoolExpr g = bexpr();
            expect_kw("then");
            Design t = design();
            expect_kw("else");
            Design e = design();
            expect_kw("fi");
            return cond(std::move(g), std::move(t), std::move(e));
        }
        if (is_kw("do"))
        {
            ++pos_;
            BoolExpr g = bexpr();
            expect_sym("->");
            Design body = design();
            expect_kw("od");
            return do_loop(std::move(g), std::move(body));
        }
        if (is_kw("var") || is_kw("method"))
        {
            const bool is_method = is_kw("method");
            ++pos_;
            std::vector<Binding> bs = bindings();
            expect_sym(";");
            Design body = design();
            expect_sym(";");
            expect_kw("end");
            return is_method ? method_block(std::move(bs), std::move(body)) : locdec(std::move(bs), std::move(body));
        }
        if (peek().kind == Tok::Ident && !is_keyword(peek().text))
            return call_or_assign();
        fail("expected design");
    }

    Design choice_level()
    {
        Design d = atom();
        if (is_sym("|~|"))
        {
            ++pos_;
            return choice(std::move(d), choice_level());
        }
        return d;
    }

    Design design()
    {
        Design d = choice_level();
        if (is_sym(";") && !is_kw("end", 1))
        {
            ++pos_;
            return seq(std::move(d), design());
        }
        return d;
    }

    // ------------------------------------------------------------ task file

    void method_decl(MethodTable& table)
    {
        const Token& at = peek();
        Label cls = label();
        expect_sym("::");
        Label name = label();
        expect_sym("(");
        MethodDef def{{}, std::nullopt, skip()};
        std::set<Label> seen;
        auto add_formal = [&](const Label& l) {
            if (!seen.insert(l).second)
                throw ParseError("duplicate formal '" + l + "'", at.line, at.column);
        };
        if (!is_sym(")") && !is_sym(";"))
        {
            def.formals.push_back(label());
            add_formal(def.formals.back());
            while (is_sym(","))
            {
                ++pos_;
                def.formals.push_back(label());
                add_formal(def.formals.back());
            }
        }
        if (is_sym(";"))
        {
            ++pos_;
            def.ret = label();
            add_formal(*def.ret);
        }
        expect_sym(")");
        if (def.formals.empty() || def.formals.front() != "this")
            throw ParseError("first formal of '" + cls + "::" + name + "' must be 'this'", at.line, at.column);
        expect_sym("{");
        const MethodTable* saved = table_;
        table_ = &table;
        def.body = design();
        table_ = saved;
        expect_sym("}");
        if (!table.entries.emplace(std::make_pair(cls, name), std::move(def)).second)
            throw ParseError("duplicate method '" + cls + "::" + name + "'", at.line, at.column);
    }

    Design braced_design()
    {
        expect_sym("{");
        Design d = design();
        expect_sym("}");
        return d;
    }

    const std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const MethodTable* table_;
};

RefinementTask Parser::task()
{
    RefinementTask t{"", skip(), skip(), {}, {}};
    expect_kw("task");
    t.name = label();
    expect_sym("{");
    if (is_kw("methods"))
    {
        ++pos_;
        expect_sym("{");
        while (!is_sym("}"))
            method_decl(t.methods);
        expect_sym("}");
    }
    table_ = &t.methods;
    expect_kw("lhs");
    t.lhs = braced_design();
    expect_kw("rhs");
    t.rhs = braced_design();
    if (is_kw("rules"))
    {
        ++pos_;
        expect_sym("{");
        while (!is_sym("}"))
        {
            t.rule_groups.push_back(label());
            if (is_sym(","))
                ++pos_;
        }
        expect_sym("}");
    }
    expect_sym("}");
    expect_end();
    table_ = nullptr;
    return t;
}

} // namespace

RefinementTask parse_task(const std::string& text)
{
    Parser p(text, nullptr);
    return p.task();
}

Design parse_design(const std::string& text, const MethodTable* table)
{
    Parser p(text, table);
    return p.design_eof();
}

Expr parse_expr(const std::string& text)
{
    Parser p(text, nullptr);
    return p.expr_eof();
}

BoolExpr parse_bool(const std::string& text)
{
    Parser p(text, nullptr);
    return p.bool_eof();
}

PostRel parse_postrel(const std::string& text)
{
    Parser p(text, nullptr);
    return p.post_eof();
}

} // namespace refine

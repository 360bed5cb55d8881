#pragma once

// Abstract syntax, parser and pretty-printer for the design language and
// refinement task files.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace refine
{

/// Shared immutable pointer with structural equality. Lets the recursive AST
/// types stay value-semantic while sharing subterms.
template <class T>
class Rc
{
public:
    Rc() = default;
    Rc(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}

    const T& operator*() const { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Rc& a, const Rc& b)
    {
        if (a.ptr_ == b.ptr_)
            return true;
        if (!a.ptr_ || !b.ptr_)
            return false;
        return *a.ptr_ == *b.ptr_;
    }

private:
    std::shared_ptr<const T> ptr_;
};

using Label = std::string;

bool is_valid_label(const std::string& text);
bool is_keyword(const std::string& text);

/// A navigation path. Labels are stored in reversed navigation order: the
/// surface path `a.b.x` is stored as [x, b, a]. The empty path denotes the
/// current root.
struct Path
{
    std::vector<Label> labels;

    static Path from_surface(const std::vector<Label>& surface);
    static Path parse(const std::string& dotted);

    std::vector<Label> surface() const;
    bool empty() const { return labels.empty(); }
    std::size_t size() const { return labels.size(); }

    /// First navigation step (the variable).
    const Label& head() const { return labels.back(); }
    /// Final navigation step (the field being accessed).
    const Label& last() const { return labels.front(); }
    /// The path without its final label.
    Path owner() const;
    /// `this.field` for a label appended at the end.
    Path extend(const Label& field) const;
    /// Prefix of the given surface length.
    Path prefix(std::size_t length) const;

    bool operator==(const Path&) const = default;
    auto operator<=>(const Path&) const = default;
};

std::string to_string(const Path& p);

// ---------------------------------------------------------------- Expr

struct Expr;

struct IntConst
{
    std::int64_t value = 0;
    bool operator==(const IntConst&) const = default;
};

struct PathRef
{
    Path path;
    bool operator==(const PathRef&) const = default;
};

struct Plus
{
    Rc<Expr> left, right;
    bool operator==(const Plus&) const = default;
};

struct Minus
{
    Rc<Expr> left, right;
    bool operator==(const Minus&) const = default;
};

struct Expr
{
    std::variant<IntConst, PathRef, Plus, Minus> node;
    bool operator==(const Expr&) const = default;
};

Expr int_const(std::int64_t v);
Expr path_ref(Path p);
Expr plus(Expr l, Expr r);
Expr minus(Expr l, Expr r);

// ---------------------------------------------------------------- BoolExpr

struct BoolExpr;

struct TrueB
{
    bool operator==(const TrueB&) const = default;
};
struct FalseB
{
    bool operator==(const FalseB&) const = default;
};
struct Eq
{
    Expr left, right;
    bool operator==(const Eq&) const = default;
};
struct Lt
{
    Expr left, right;
    bool operator==(const Lt&) const = default;
};
struct Not
{
    Rc<BoolExpr> operand;
    bool operator==(const Not&) const = default;
};
struct And
{
    Rc<BoolExpr> left, right;
    bool operator==(const And&) const = default;
};
struct Or
{
    Rc<BoolExpr> left, right;
    bool operator==(const Or&) const = default;
};
struct Alias
{
    Path first, second;
    bool operator==(const Alias&) const = default;
};

struct BoolExpr
{
    std::variant<TrueB, FalseB, Eq, Lt, Not, And, Or, Alias> node;
    bool operator==(const BoolExpr&) const = default;
};

BoolExpr b_true();
BoolExpr b_false();
BoolExpr b_eq(Expr l, Expr r);
BoolExpr b_lt(Expr l, Expr r);
BoolExpr b_not(BoolExpr b);
BoolExpr b_and(BoolExpr l, BoolExpr r);
BoolExpr b_or(BoolExpr l, BoolExpr r);
BoolExpr b_alias(Path p, Path q);

// ---------------------------------------------------------------- PostRel

struct PostRel;

/// `path' = rhs`: the path is read in the post-state, rhs in the pre-state.
struct PostEq
{
    Path path;
    Expr rhs;
    bool operator==(const PostEq&) const = default;
};
struct PostAlias
{
    Path first, second;
    bool operator==(const PostAlias&) const = default;
};
struct RDisj
{
    Rc<PostRel> left, right;
    bool operator==(const RDisj&) const = default;
};
struct RConj
{
    Rc<PostRel> left, right;
    bool operator==(const RConj&) const = default;
};
struct RTrue
{
    bool operator==(const RTrue&) const = default;
};

struct PostRel
{
    std::variant<PostEq, PostAlias, RDisj, RConj, RTrue> node;
    bool operator==(const PostRel&) const = default;
};

PostRel post_eq(Path p, Expr e);
PostRel post_alias(Path p, Path q);
PostRel r_disj(PostRel l, PostRel r);
PostRel r_conj(PostRel l, PostRel r);
PostRel r_true();

/// Paths occurring in post-position, in first-occurrence order, deduplicated.
std::vector<Path> frame(const PostRel& r);

// ---------------------------------------------------------------- Design

struct Design;

struct Binding
{
    Label label;
    Expr init;
    bool operator==(const Binding&) const = default;
};

struct PP
{
    BoolExpr pre;
    PostRel post;
    bool operator==(const PP&) const = default;
};
struct AssignD
{
    Path path;
    Expr rhs;
    bool operator==(const AssignD&) const = default;
};
struct Seq
{
    Rc<Design> first, second;
    bool operator==(const Seq&) const = default;
};
struct Cond
{
    BoolExpr guard;
    Rc<Design> then_branch, else_branch;
    bool operator==(const Cond&) const = default;
};
struct Do
{
    BoolExpr guard;
    Rc<Design> body;
    bool operator==(const Do&) const = default;
};
struct Locdec
{
    std::vector<Binding> bindings;
    Rc<Design> body;
    bool operator==(const Locdec&) const = default;
};
struct MethodBlock
{
    std::vector<Binding> bindings;
    Rc<Design> body;
    bool operator==(const MethodBlock&) const = default;
};
struct SkipD
{
    bool operator==(const SkipD&) const = default;
};
struct ChaosD
{
    bool operator==(const ChaosD&) const = default;
};
struct Choice
{
    Rc<Design> left, right;
    bool operator==(const Choice&) const = default;
};
struct AssertD
{
    BoolExpr cond;
    bool operator==(const AssertD&) const = default;
};

struct Design
{
    std::variant<PP, AssignD, Seq, Cond, Do, Locdec, MethodBlock, SkipD, ChaosD, Choice, AssertD> node;
    bool operator==(const Design&) const = default;

    template <class T>
    const T* as() const
    {
        return std::get_if<T>(&node);
    }
};

Design pp(BoolExpr pre, PostRel post);
Design assign(Path p, Expr e);
Design seq(Design a, Design b);
Design cond(BoolExpr guard, Design then_branch, Design else_branch);
Design do_loop(BoolExpr guard, Design body);
Design locdec(std::vector<Binding> bindings, Design body);
Design method_block(std::vector<Binding> bindings, Design body);
Design skip();
Design chaos();
Design choice(Design a, Design b);
Design assert_d(BoolExpr b);

// ---------------------------------------------------------------- tasks

struct MethodDef
{
    std::vector<Label> formals; // formals[0] is the receiver `this`
    std::optional<Label> ret;   // formal return parameter
    Design body;
};

struct MethodTable
{
    std::map<std::pair<Label, Label>, MethodDef> entries;

    /// Looks a method up by name alone; throws if missing or ambiguous.
    std::pair<std::pair<Label, Label>, const MethodDef*> resolve(const Label& method) const;
};

struct RefinementTask
{
    std::string name;
    Design lhs;
    Design rhs;
    MethodTable methods;
    std::vector<std::string> rule_groups; // empty: use the tool's defaults
};

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& msg, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Raised for unknown methods and arity mismatches.
class CallError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

RefinementTask parse_task(const std::string& text);
Design parse_design(const std::string& text, const MethodTable* table = nullptr);
Expr parse_expr(const std::string& text);
BoolExpr parse_bool(const std::string& text);
PostRel parse_postrel(const std::string& text);

Design desugar_call(const Path& receiver, const std::pair<Label, Label>& method, const std::vector<Expr>& actuals,
                    const std::optional<Path>& out, const MethodTable& table);

std::string render(const Expr& e);
std::string render(const BoolExpr& b);
std::string render(const PostRel& r);
std::string render(const Design& d);

/// Paths whose head label is not bound by an enclosing local block, i.e. the
/// paths that must resolve in the initial state.
std::vector<Path> free_paths(const Design& d);
/// Every label mentioned in any path of the design, split into variable
/// (head) labels of free paths and all remaining labels.
void collect_labels(const Design& d, std::vector<Label>& vars, std::vector<Label>& fields);
/// Integer constants occurring anywhere in the design.
std::vector<std::int64_t> constants(const Design& d);

} // namespace refine

#pragma once

// Predicate-transformer (wp) and relational semantics of designs over state
// graphs.

#include "refine/lang.hpp"
#include "refine/stategraph.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refine
{

struct SemanticsConfig
{
    /// Leaf values a specification may choose for a frame path (in addition
    /// to the values its own right-hand sides evaluate to).
    std::vector<std::int64_t> values{0, 1, 2, 3};
    /// Maximum number of loop-body executions before giving up.
    int unroll_limit = 8;
};

using StatePred = std::function<bool(const StateGraph&)>;
using Transformer = std::function<StatePred(StatePred)>;

/// Raised by wp when a loop needs more iterations than the unroll limit.
class LoopBoundExceeded : public std::runtime_error
{
public:
    LoopBoundExceeded() : std::runtime_error("loop unroll limit exceeded") {}
};

struct Outcome
{
    enum class Kind
    {
        Terminates,
        Abort,
        Magic,
        NonTermination
    };

    Kind kind = Kind::Terminates;
    /// Final states, deduplicated and ordered by fingerprint.
    std::vector<StateGraph> states;
    std::vector<std::string> fingerprints;

    static Outcome abort() { return {Kind::Abort, {}, {}}; }
    static Outcome nontermination() { return {Kind::NonTermination, {}, {}}; }
    static Outcome of(std::vector<StateGraph> states);

    bool terminates() const { return kind == Kind::Terminates || kind == Kind::Magic; }
};

std::string to_string(Outcome::Kind k);

/// Integer value of an expression, if every path it reads resolves to a leaf.
std::optional<std::int64_t> eval_int(const Expr& e, const StateGraph& g);

/// The vertex an expression denotes. Constants and arithmetic produce a fresh
/// leaf, so the returned graph carries the advanced id counter.
std::optional<std::pair<Vertex, StateGraph>> eval_vertex(const Expr& e, const StateGraph& g);

/// Guard evaluation; false whenever a mentioned path is ill-formed.
bool eval_bool(const BoolExpr& b, const StateGraph& g);
/// Nullopt when a mentioned path is ill-formed.
std::optional<bool> try_eval_bool(const BoolExpr& b, const StateGraph& g);

/// Relation between a pre-state and a candidate post-state.
bool eval_post(const PostRel& r, const StateGraph& pre, const StateGraph& post);

/// Every post-state admitted by `[true |- r]` from `pre`: frame paths may be
/// rewired, everything else is unchanged.
std::vector<StateGraph> post_states(const PostRel& r, const StateGraph& pre, const SemanticsConfig& cfg);

StatePred pred_of(const BoolExpr& b);

/// Weakest precondition of q under d. Evaluating the result may throw
/// LoopBoundExceeded.
StatePred wp(const Design& d, StatePred q, const SemanticsConfig& cfg = {});

/// Relational execution from a single state.
Outcome exec(const Design& d, const StateGraph& g, const SemanticsConfig& cfg = {});

struct MonotonicityReport
{
    bool monotonic = true;
    std::string witness;
};

/// Samples pairs of predicates q1 => q2 and checks t(q1) => t(q2) on every
/// graph in `graphs`.
MonotonicityReport is_monotonic_sampled(const Transformer& t, const std::vector<StateGraph>& graphs, int samples,
                                        std::uint64_t seed);
MonotonicityReport is_monotonic_sampled(const Design& d, const std::vector<StateGraph>& graphs, int samples,
                                        std::uint64_t seed, const SemanticsConfig& cfg = {});

} // namespace refine

#pragma once

// Proof search over obligation stores.

#include "refine/lang.hpp"
#include "refine/oracle.hpp"
#include "refine/rules.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refine
{

struct SearchConfig
{
    int time_limit_ms = 5000;
    std::size_t max_obligations = 64;
    int max_depth = 40;
    bool prefer_shortest = true;
    bool allow_sorry = false;
    std::vector<std::string> enabled_rule_groups; // empty: all groups
};

ObligationStore init_store(const RefinementTask& task);

/// Generator candidates drawn from the task: its integer literals.
RuleContext make_context(const RefinementTask& task, const SearchConfig& cfg);

struct TraceStep
{
    std::string rule;
    int target = 0;
    std::string detail;
};

struct Successor
{
    ObligationStore store;
    std::vector<TraceStep> steps; // the application, then the equations it enabled
};

/// Applies Equation rules until none matches. Returns the applied steps.
std::vector<TraceStep> close_equations(ObligationStore& store, const std::vector<const Rule*>& rules,
                                       const RuleContext& ctx);

/// One successor per non-equation application, each closed under equations,
/// in rule priority order, then application order.
std::vector<Successor> successors(const ObligationStore& store, const std::vector<const Rule*>& rules,
                                  const RuleContext& ctx);

std::vector<ObligationStore> explore_step(const ObligationStore& store, const std::vector<const Rule*>& rules,
                                          const RuleContext& ctx);

/// Root closed and everything it depends on closed.
bool proof_complete(const ObligationStore& store);

enum class FailureKind
{
    None,
    Timeout,
    Exhausted,
    Bound
};

std::string to_string(FailureKind k);

struct SearchStats
{
    std::size_t expanded = 0;
    std::size_t generated = 0;
    std::int64_t elapsed_ms = 0;
    bool fell_back = false; // the shortest search ran out of time and DFS took over
};

struct SearchResult
{
    bool proved = false;
    std::vector<TraceStep> trace;
    ObligationStore store; // final store, or the best partial one on failure
    FailureKind failure = FailureKind::None;
    std::string reason;
    SearchStats stats;

    std::vector<std::string> rule_names() const;
};

SearchResult search(const ObligationStore& initial, const std::vector<const Rule*>& rules, const RuleContext& ctx,
                    const SearchConfig& cfg);

/// Problems with a finished proof; empty when it checks out. Every closed
/// obligation the root depends on (except those resting on a sorry) is sent
/// through the oracle at `bounds`.
std::vector<std::string> verify_proof(const ObligationStore& store, bool allow_sorry, const OracleBounds& bounds);

} // namespace refine

#pragma once

// Bounded refinement checking by exhaustive enumeration of small state graphs.
// Holds is evidence at the given bounds, not a proof; only Counterexample is
// definitive.

#include "refine/lang.hpp"
#include "refine/rules.hpp"
#include "refine/semantics.hpp"
#include "refine/stategraph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refine
{

struct OracleBounds
{
    int max_nodes = 3;
    std::vector<std::int64_t> values{0, 1, 2, 3};
    std::vector<Label> var_labels;   // labels allowed on root edges
    std::vector<Label> field_labels; // labels allowed on node edges
    std::size_t max_path_len = 4;
    int unroll_limit = 8;
    std::size_t max_graphs = 200000;
    Label node_class = "Obj";

    SemanticsConfig semantics() const;
};

/// Fills the label alphabets from the paths mentioned by the designs.
OracleBounds derive_bounds(const std::vector<Design>& designs, OracleBounds base = {});

struct Enumeration
{
    std::vector<StateGraph> graphs; // by node count, then generation order
    bool truncated = false;
};

/// Every well-formed single-root graph (up to renaming of ids) whose root
/// edges use var_labels and node edges use field_labels, with at most
/// max_nodes reachable nodes and leaves over `values`.
Enumeration enumerate_graphs(const OracleBounds& b);

struct Verdict
{
    enum class Kind
    {
        Holds,
        Counterexample,
        Unknown
    };

    Kind kind = Kind::Unknown;
    std::string reason;
    StateGraph graph; // the failing initial state for a counterexample
    Outcome lhs_outcome;
    Outcome rhs_outcome;
    std::size_t graphs_checked = 0;     // admissible initial states
    std::size_t graphs_constrained = 0; // those on which the lhs did not abort
};

std::string to_string(Verdict::Kind k);

/// lhs is refined by rhs on every enumerated graph on which all free paths of
/// both designs are well-formed.
Verdict check_refinement(const Design& lhs, const Design& rhs, const OracleBounds& b);

/// check_refinement with alphabets derived from the two designs.
Verdict check_refinement(const Design& lhs, const Design& rhs);

/// Soundness gate for one closed obligation: its lhs is refined by its rhs.
Verdict validate_discharge(const Obligation& ob, const OracleBounds& b);

/// Counterexample report: initial graph and both outcome sets.
std::string describe(const Verdict& v);

} // namespace refine

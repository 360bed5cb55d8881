#pragma once

// Turns a finished obligation store into a linear, named-fact proof witness.

#include "refine/lang.hpp"
#include "refine/rules.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace refine
{

class CertifyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The obligations the root transitively depends on.
struct ProofDag
{
    int root = 0;
    std::vector<int> nodes; // ascending ids
    ObligationStore store;
};

ProofDag extract(const ObligationStore& final_store);

struct WitnessFact
{
    enum class Kind
    {
        Refines,  // lhs ref rhs
        Monotonic // monotonic lhs
    };

    std::string name; // f0 is the goal
    Kind kind = Kind::Refines;
    Design lhs;
    Design rhs; // skip for Monotonic facts
    std::string lemma;
    std::string rule;              // empty for side facts
    std::vector<std::string> from; // earlier facts or sorry stubs
    std::vector<std::string> inst; // numeric instantiation, e.g. assign_end [of p m n]
    std::vector<Design> of;        // design instantiation, e.g. ref_transitive [of L M R]
    int obligation = -1;           // -1 for side facts

    bool operator==(const WitnessFact&) const = default;
};

/// An implication the search did not prove.
struct WitnessSorry
{
    std::string name;
    PostRel premise;
    PostRel conclusion;
    int obligation = -1;

    bool operator==(const WitnessSorry&) const = default;
};

struct ProofWitness
{
    std::string task;
    Design goal_lhs;
    Design goal_rhs;
    std::vector<std::string> trace;
    std::vector<std::pair<std::string, Design>> abbreviations; // ?A, ?B, ... in first-use order
    std::vector<WitnessFact> facts;                             // emission order, goal last
    std::vector<WitnessSorry> sorries;

    bool operator==(const ProofWitness&) const = default;
};

ProofWitness emit_witness(const ProofDag& dag, const std::string& task_name, const std::vector<std::string>& trace);

enum class Dialect
{
    PlainText,
    IsarLike
};

std::string render_script(const ProofWitness& w, Dialect dialect);

/// Reads back the PlainText rendering.
ProofWitness parse_plain(const std::string& text);

/// Re-derives every fact from its justification using per-lemma statement
/// templates and checks that the last fact is the goal. Returns the problems
/// found; empty means the witness replays.
std::vector<std::string> replay(const ProofWitness& w);

} // namespace refine

#pragma once

// Proof obligations and the catalog of refinement rewrite rules.

#include "refine/lang.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace refine
{

struct Todo
{
    bool operator==(const Todo&) const = default;
};

/// An auxiliary fact a discharge relies on, e.g. `monotonic ?E`.
struct SideFact
{
    std::string lemma;
    Design subject;
    bool operator==(const SideFact&) const = default;
};

struct Discharged
{
    std::string rule;
    std::string lemma;
    std::vector<int> from;
    std::vector<SideFact> side;
    std::vector<std::string> inst; // rendered lemma instantiation, may be empty
    bool operator==(const Discharged&) const = default;
};

/// An implication left unproved: `premise` implies `conclusion`.
struct Residual
{
    std::string rule;
    PostRel premise;
    PostRel conclusion;
    bool operator==(const Residual&) const = default;
};

using Status = std::variant<Todo, Discharged, Residual>;

struct Obligation
{
    int id = 0;
    Design lhs;
    Design rhs;
    Status status;

    bool todo() const { return std::holds_alternative<Todo>(status); }
    bool operator==(const Obligation&) const = default;
};

std::string status_text(const Status& s);

class ObligationStore
{
public:
    ObligationStore() = default;
    explicit ObligationStore(Design lhs, Design rhs);

    const std::vector<Obligation>& obligations() const { return obligations_; }
    const Obligation& at(int id) const;
    int root_id() const { return 0; }
    int next_id() const { return static_cast<int>(obligations_.size()); }
    /// Changes with every mutation and is unique across stores; applications
    /// carry the revision they were computed for.
    std::uint64_t revision() const { return revision_; }

    const Obligation* find(const Design& lhs, const Design& rhs) const;
    bool root_done() const { return !obligations_.empty() && !obligations_.front().todo(); }
    std::size_t open_count() const;
    std::size_t residual_count() const;

    /// Order-insensitive summary of the (lhs, rhs, status kind) triples.
    std::string fingerprint() const;

    // Used by rule effects. Both advance the revision.
    int add(Design lhs, Design rhs, Status status = Todo{});
    void set_status(int id, Status status);

private:
    std::vector<Obligation> obligations_;
    std::uint64_t revision_ = 0;
};

class StaleApplication : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

enum class RuleKind
{
    Generate,
    Discharge,
    Equation,
    GenerateDischarge
};

std::string to_string(RuleKind k);

/// Information about the task that generators may draw candidates from.
struct RuleContext
{
    std::vector<std::int64_t> constants;
    bool allow_sorry = false;
};

struct Rule;

struct Application
{
    const Rule* rule = nullptr;
    int target = 0;           // obligation the rule fires on
    std::uint64_t revision = 0;
    std::string detail;       // human-readable description
    std::function<void(ObligationStore&)> effect;
};

/// A random instance of a discharge for the selftest. The conclusion must
/// hold whenever every premise holds.
struct Sample
{
    Design lhs;
    Design rhs;
    std::vector<std::pair<Design, Design>> premises;
};

struct Rule
{
    std::string name;
    RuleKind kind = RuleKind::Discharge;
    std::string lemma;
    std::string group;
    std::string summary;
    int priority = 0; // position in the catalog; lower is preferred
    std::function<std::vector<Application>(const Rule&, const ObligationStore&, const RuleContext&)> matcher;
    /// Random discharge instance for the soundness selftest (Discharge rules).
    std::function<std::optional<Sample>(std::mt19937_64&)> sampler;
};

/// The built-in catalog in priority order.
const std::vector<Rule>& builtin_rules();

/// Rules of the catalog belonging to the named groups (all when empty).
std::vector<const Rule*> select_rules(const std::vector<std::string>& groups);

std::vector<std::string> rule_groups();
const Rule* find_rule(const std::string& name);
bool is_catalog_lemma(const std::string& lemma);

/// Applications of `rule` on the store in deterministic order (target id,
/// then structural order).
std::vector<Application> match(const Rule& rule, const ObligationStore& store, const RuleContext& ctx);

/// Applies an application computed for exactly this store revision.
ObligationStore apply(const Application& app, const ObligationStore& store);

/// A deliberately unsound variant of ref-pp-assign (the assigned value is off
/// by one) used as a negative control for the selftest.
const Rule& corrupted_rule_fixture();

/// Lemma name for the monotonicity side fact of a design's first component.
std::string monotonic_lemma(const Design& d);

} // namespace refine

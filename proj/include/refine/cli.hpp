#pragma once

// Command-line front end: check, oracle and rules commands. The executable
// only forwards to run_cli.

#include "refine/oracle.hpp"
#include "refine/rules.hpp"
#include "refine/search.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace refine
{

enum class RunResult
{
    Proved,
    ProvedWithResiduals,
    Refuted,
    Unknown,
    SearchFailed,
    UsageError
};

std::string to_string(RunResult r);

/// 0, 10, 20, 30, 40 and 2 in declaration order.
int exit_code(RunResult r);

struct RunReport
{
    std::string task;
    RunResult result = RunResult::UsageError;
    std::size_t residuals = 0;
    std::size_t trace_length = 0;
    std::int64_t elapsed_ms = 0;
    std::vector<std::string> artifacts; // files written
    std::string message;
};

/// Parses `nodes=3,values=0..3,unroll=8` (also `values=1|4|7`, `graphs=N`,
/// `path=N`) on top of `base`. Throws std::invalid_argument.
OracleBounds parse_bounds(const std::string& spec, OracleBounds base = {});

struct CheckOptions
{
    SearchConfig search;
    bool rules_given = false; // --rules overrides the task's own groups
    OracleBounds bounds;
    std::string out_dir = ".";
};

RunReport cmd_check(const std::string& task_file, const CheckOptions& opt, std::ostream& out);
RunReport cmd_oracle(const std::string& task_file, const OracleBounds& bounds, const std::string& out_dir,
                     std::ostream& out);

void cmd_rules_list(std::ostream& out);

struct RuleSelftest
{
    std::string rule;
    int holds = 0;
    int unknown = 0;
    int skipped = 0; // a premise did not hold at the bounds
    int counterexamples = 0;
    std::string first_failure; // sample and oracle report
};

struct SelftestReport
{
    std::vector<RuleSelftest> rules;
    RuleSelftest control; // the corrupted fixture
    bool passed() const;
};

/// Runs `n` sampled instances of every rule that has a sampler through the
/// oracle, plus the corrupted fixture as a negative control.
SelftestReport run_selftest(int n, std::uint64_t seed, const OracleBounds& bounds);

/// `n` sampled instances of one rule: premises first, then the conclusion
/// when they all hold.
RuleSelftest check_samples(const Rule& rule, int n, std::uint64_t seed, const OracleBounds& bounds);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace refine

#include "refine/cli.hpp"

#include "refine/certify.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace refine
{

std::string to_string(RunResult r)
{
    switch (r)
    {
    case RunResult::Proved:
        return "proved";
    case RunResult::ProvedWithResiduals:
        return "proved with sorries";
    case RunResult::Refuted:
        return "refuted";
    case RunResult::Unknown:
        return "unknown";
    case RunResult::SearchFailed:
        return "search failed";
    case RunResult::UsageError:
        return "usage error";
    }
    return "?";
}

int exit_code(RunResult r)
{
    switch (r)
    {
    case RunResult::Proved:
        return 0;
    case RunResult::ProvedWithResiduals:
        return 10;
    case RunResult::Refuted:
        return 20;
    case RunResult::Unknown:
        return 30;
    case RunResult::SearchFailed:
        return 40;
    case RunResult::UsageError:
        return 2;
    }
    return 2;
}

namespace
{

std::int64_t parse_int(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    long long v = 0;
    try
    {
        v = std::stoll(text, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw std::invalid_argument("bounds: '" + key + "' needs an integer, got '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, sep);)
        out.push_back(item);
    return out;
}

} // namespace

OracleBounds parse_bounds(const std::string& spec, OracleBounds base)
{
    for (const auto& item : split(spec, ','))
    {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bounds: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "nodes")
        {
            base.max_nodes = static_cast<int>(parse_int(key, val));
            if (base.max_nodes < 0)
                throw std::invalid_argument("bounds: nodes must not be negative");
        }
        else if (key == "unroll")
        {
            base.unroll_limit = static_cast<int>(parse_int(key, val));
            if (base.unroll_limit <= 0)
                throw std::invalid_argument("bounds: unroll must be positive");
        }
        else if (key == "graphs" || key == "path")
        {
            const auto n = parse_int(key, val);
            if (n <= 0)
                throw std::invalid_argument("bounds: " + key + " must be positive");
            (key == "graphs" ? base.max_graphs : base.max_path_len) = static_cast<std::size_t>(n);
        }
        else if (key == "values")
        {
            base.values.clear();
            if (const auto dots = val.find(".."); dots != std::string::npos)
            {
                const auto lo = parse_int(key, val.substr(0, dots));
                const auto hi = parse_int(key, val.substr(dots + 2));
                if (hi < lo || hi - lo > 64)
                    throw std::invalid_argument("bounds: bad value range '" + val + "'");
                for (auto v = lo; v <= hi; ++v)
                    base.values.push_back(v);
            }
            else
                for (const auto& v : split(val, '|'))
                    base.values.push_back(parse_int(key, v));
            if (base.values.empty())
                throw std::invalid_argument("bounds: empty value domain");
        }
        else
            throw std::invalid_argument("bounds: unknown key '" + key + "'");
    }
    return base;
}

namespace
{

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t)
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t).count();
}

RefinementTask load_task(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read task file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_task(ss.str());
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& content)
{
    std::filesystem::create_directories(dir);
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << content;
    return path;
}

std::string cex_text(const RefinementTask& t, const Verdict& v)
{
    std::ostringstream os;
    os << "task: " << t.name << "\nobligation: 0 (the goal)\n"
       << "lhs: " << render(t.lhs) << "\nrhs: " << render(t.rhs) << '\n'
       << describe(v);
    return os.str();
}

OracleBounds task_bounds(const RefinementTask& t, const OracleBounds& base) { return derive_bounds({t.lhs, t.rhs}, base); }

void print_verdict_summary(std::ostream& out, const Verdict& v)
{
    out << "oracle: " << to_string(v.kind) << " (" << v.graphs_checked << " graphs, lhs defined on "
        << v.graphs_constrained << ")\n";
}

} // namespace

RunReport cmd_check(const std::string& task_file, const CheckOptions& opt, std::ostream& out)
{
    const auto start = Clock::now();
    RunReport rep;
    RefinementTask task;
    try
    {
        task = load_task(task_file);
    }
    catch (const std::exception& e)
    {
        rep.message = e.what();
        out << "error: " << rep.message << '\n';
        return rep;
    }
    rep.task = task.name;
    out << "task: " << task.name << '\n';

    SearchConfig cfg = opt.search;
    if (!opt.rules_given && cfg.enabled_rule_groups.empty())
        cfg.enabled_rule_groups = task.rule_groups;
    std::vector<const Rule*> rules;
    try
    {
        rules = select_rules(cfg.enabled_rule_groups);
    }
    catch (const std::invalid_argument& e)
    {
        rep.message = e.what();
        out << "error: " << rep.message << '\n';
        return rep;
    }

    const SearchResult sr = search(init_store(task), rules, make_context(task, cfg), cfg);
    const OracleBounds bounds = task_bounds(task, opt.bounds);

    auto refute_or = [&](RunResult otherwise, const std::string& why) {
        const Verdict v = check_refinement(task.lhs, task.rhs, bounds);
        print_verdict_summary(out, v);
        if (v.kind == Verdict::Kind::Counterexample)
        {
            rep.result = RunResult::Refuted;
            rep.message = "the goal is false; counterexample found";
            out << describe(v);
            rep.artifacts.push_back(write_file(opt.out_dir, task.name + ".cex.txt", cex_text(task, v)));
        }
        else
        {
            rep.result = v.kind == Verdict::Kind::Unknown ? RunResult::Unknown : otherwise;
            rep.message = why + (v.kind == Verdict::Kind::Holds
                                     ? "; the oracle finds no counterexample at its bounds"
                                     : "; the oracle is inconclusive: " + v.reason);
        }
    };

    if (!sr.proved)
    {
        out << "search: " << to_string(sr.failure) << " after " << sr.stats.expanded << " expansions ("
            << sr.reason << ")\n";
        refute_or(RunResult::SearchFailed, "no proof found (" + sr.reason + ")");
    }
    else
    {
        const auto problems = verify_proof(sr.store, cfg.allow_sorry, opt.bounds);
        if (!problems.empty())
        {
            for (const auto& p : problems)
                out << "verifier: " << p << '\n';
            refute_or(RunResult::SearchFailed, "the proof was rejected by the verifier");
        }
        else
        {
            const ProofWitness w = emit_witness(extract(sr.store), task.name, sr.rule_names());
            rep.trace_length = sr.trace.size();
            rep.residuals = w.sorries.size();
            rep.result = rep.residuals ? RunResult::ProvedWithResiduals : RunResult::Proved;
            std::string trace;
            for (const auto& s : sr.trace)
                trace += s.rule + '\n';
            rep.artifacts.push_back(write_file(opt.out_dir, task.name + ".trace", trace));
            rep.artifacts.push_back(
                write_file(opt.out_dir, task.name + ".proof.txt", render_script(w, Dialect::PlainText)));
            rep.artifacts.push_back(
                write_file(opt.out_dir, task.name + ".proof.thy-like", render_script(w, Dialect::IsarLike)));
            out << "trace: " << rep.trace_length << (rep.trace_length == 1 ? " step" : " steps") << (sr.stats.fell_back ? " (first found)" : "")
                << '\n';
            for (std::size_t i = 0; i < sr.trace.size(); ++i)
                out << std::setw(4) << i + 1 << "  " << sr.trace[i].rule << '\n';
            if (rep.residuals)
                out << "sorries: " << rep.residuals << '\n';
        }
    }
    rep.elapsed_ms = ms_since(start);
    out << "result: " << to_string(rep.result) << '\n';
    if (!rep.message.empty())
        out << "note: " << rep.message << '\n';
    for (const auto& a : rep.artifacts)
        out << "wrote: " << a << '\n';
    return rep;
}

RunReport cmd_oracle(const std::string& task_file, const OracleBounds& base, const std::string& out_dir,
                     std::ostream& out)
{
    const auto start = Clock::now();
    RunReport rep;
    RefinementTask task;
    try
    {
        task = load_task(task_file);
    }
    catch (const std::exception& e)
    {
        rep.message = e.what();
        out << "error: " << rep.message << '\n';
        return rep;
    }
    rep.task = task.name;
    out << "task: " << task.name << '\n';
    const Verdict v = check_refinement(task.lhs, task.rhs, task_bounds(task, base));
    out << describe(v);
    switch (v.kind)
    {
    case Verdict::Kind::Holds:
        rep.result = RunResult::Proved;
        break;
    case Verdict::Kind::Counterexample:
        rep.result = RunResult::Refuted;
        rep.artifacts.push_back(write_file(out_dir, task.name + ".cex.txt", cex_text(task, v)));
        break;
    case Verdict::Kind::Unknown:
        rep.result = RunResult::Unknown;
        rep.message = v.reason;
        break;
    }
    rep.elapsed_ms = ms_since(start);
    out << "result: " << to_string(v.kind) << '\n';
    for (const auto& a : rep.artifacts)
        out << "wrote: " << a << '\n';
    return rep;
}

void cmd_rules_list(std::ostream& out)
{
    std::size_t w = 0;
    for (const auto& r : builtin_rules())
        w = std::max(w, r.name.size());
    for (const auto& r : builtin_rules())
        out << std::left << std::setw(static_cast<int>(w) + 2) << r.name << std::setw(20) << to_string(r.kind)
            << std::setw(12) << r.group << std::setw(28) << r.lemma << r.summary << '\n';
}

RuleSelftest check_samples(const Rule& rule, int n, std::uint64_t seed, const OracleBounds& bounds)
{
    RuleSelftest res;
    res.rule = rule.name;
    if (!rule.sampler)
        return res;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i)
    {
        const auto sample = rule.sampler(rng);
        if (!sample)
        {
            ++res.skipped;
            continue;
        }
        bool premises_hold = true;
        for (const auto& [l, r] : sample->premises)
            if (check_refinement(l, r, derive_bounds({l, r}, bounds)).kind != Verdict::Kind::Holds)
            {
                premises_hold = false;
                break;
            }
        if (!premises_hold)
        {
            ++res.skipped;
            continue;
        }
        const Verdict v = check_refinement(sample->lhs, sample->rhs, derive_bounds({sample->lhs, sample->rhs}, bounds));
        switch (v.kind)
        {
        case Verdict::Kind::Holds:
            ++res.holds;
            break;
        case Verdict::Kind::Unknown:
            ++res.unknown;
            break;
        case Verdict::Kind::Counterexample:
            if (res.counterexamples++ == 0)
                res.first_failure = "{" + render(sample->lhs) + "} ~> {" + render(sample->rhs) + "}\n" + describe(v);
            break;
        }
    }
    return res;
}

bool SelftestReport::passed() const
{
    if (control.counterexamples == 0)
        return false;
    for (const auto& r : rules)
        if (r.counterexamples)
            return false;
    return true;
}

SelftestReport run_selftest(int n, std::uint64_t seed, const OracleBounds& bounds)
{
    SelftestReport rep;
    for (const auto& r : builtin_rules())
        if (r.sampler)
            rep.rules.push_back(check_samples(r, n, seed + static_cast<std::uint64_t>(r.priority), bounds));
    rep.control = check_samples(corrupted_rule_fixture(), n, seed, bounds);
    return rep;
}

namespace
{

void print_selftest(std::ostream& out, const SelftestReport& rep)
{
    auto line = [&](const RuleSelftest& r) {
        out << std::left << std::setw(26) << r.rule << " holds " << std::setw(4) << r.holds << " unknown "
            << std::setw(4) << r.unknown << " skipped " << std::setw(4) << r.skipped << " counterexamples "
            << r.counterexamples << '\n';
    };
    for (const auto& r : rep.rules)
    {
        line(r);
        if (r.counterexamples)
            out << r.first_failure;
    }
    out << "negative control:\n";
    line(rep.control);
    out << (rep.control.counterexamples ? "negative control caught\n" : "negative control NOT caught\n");
    out << "selftest: " << (rep.passed() ? "pass" : "FAIL") << '\n';
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Automated refinement proofs with bounded semantic checking", "refine"};
    app.require_subcommand(1);

    CheckOptions check;
    std::string task_file;
    std::string bounds_text;
    bool first = false;
    bool shortest = false;
    std::vector<std::string> groups;

    auto* c = app.add_subcommand("check", "search a proof for a task file and write witness files");
    c->add_option("task", task_file, "task file")->required();
    c->add_option("--time-limit-ms", check.search.time_limit_ms, "search time limit")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c->add_flag("--shortest", shortest, "prefer the shortest proof (default)");
    c->add_flag("--first", first, "stop at the first proof found");
    c->add_flag("--allow-sorry", check.search.allow_sorry, "allow unproved implications as sorry stubs");
    c->add_option("--rules", groups, "rule groups to enable")->delimiter(',');
    c->add_option("--bounds", bounds_text, "oracle bounds, e.g. nodes=3,values=0..3,unroll=8");
    c->add_option("--out-dir", check.out_dir, "directory for output files")->capture_default_str();

    std::string oracle_out = ".";
    auto* o = app.add_subcommand("oracle", "check a task with the bounded oracle only");
    o->add_option("task", task_file, "task file")->required();
    o->add_option("--bounds", bounds_text, "oracle bounds, e.g. nodes=3,values=0..3,unroll=8");
    o->add_option("--out-dir", oracle_out, "directory for output files")->capture_default_str();

    auto* r = app.add_subcommand("rules", "inspect the rule catalog");
    r->require_subcommand(1);
    r->add_subcommand("list", "print the catalog");
    int n = 50;
    std::uint64_t seed = 1;
    auto* st = r->add_subcommand("selftest", "check sampled rule instances with the oracle");
    st->add_option("--n", n, "instances per rule")->capture_default_str()->check(CLI::PositiveNumber);
    st->add_option("--seed", seed, "random seed")->capture_default_str();
    st->add_option("--bounds", bounds_text, "oracle bounds");

    try
    {
        app.parse(argc, argv);
        if (first && shortest)
            throw CLI::ValidationError("--first and --shortest exclude each other");
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : exit_code(RunResult::UsageError);
    }

    try
    {
        const OracleBounds bounds = parse_bounds(bounds_text);
        if (c->parsed())
        {
            check.search.prefer_shortest = !first;
            check.search.enabled_rule_groups = groups;
            check.rules_given = !groups.empty();
            check.bounds = bounds;
            return exit_code(cmd_check(task_file, check, out).result);
        }
        if (o->parsed())
            return exit_code(cmd_oracle(task_file, bounds, oracle_out, out).result);
        if (st->parsed())
        {
            const SelftestReport rep = run_selftest(n, seed, bounds);
            print_selftest(out, rep);
            return rep.passed() ? 0 : 1;
        }
        cmd_rules_list(out);
        return 0;
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code(RunResult::UsageError);
    }
}

} // namespace refine

#include "doctest.h"
#include "support.hpp"

#include "refine/certify.hpp"
#include "refine/cli.hpp"

#include <unistd.h>

#include <filesystem>
#include <sstream>

using namespace refine;
namespace fs = std::filesystem;

namespace
{

struct Cli
{
    int code = -1;
    std::string out;
    std::string err;
};

Cli run(std::vector<std::string> args)
{
    args.insert(args.begin(), "refine");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    Cli c;
    c.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    c.out = out.str();
    c.err = err.str();
    return c;
}

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string& tag)
    {
        path = fs::temp_directory_path() / ("refine-test-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("bounds strings")
{
    const OracleBounds b = parse_bounds("nodes=2,values=0..2,unroll=5");
    CHECK(b.max_nodes == 2);
    CHECK(b.values == std::vector<std::int64_t>{0, 1, 2});
    CHECK(b.unroll_limit == 5);

    const OracleBounds c = parse_bounds("values=1|4|7,graphs=100,path=3");
    CHECK(c.values == std::vector<std::int64_t>{1, 4, 7});
    CHECK(c.max_graphs == 100);
    CHECK(c.max_path_len == 3);
    CHECK(c.max_nodes == OracleBounds{}.max_nodes);

    CHECK(parse_bounds("").values == OracleBounds{}.values);
    CHECK(parse_bounds("values=-2..1").values == std::vector<std::int64_t>{-2, -1, 0, 1});

    for (const char* bad : {"nodes", "nodes=x", "colour=3", "values=3..1", "nodes=-1", "unroll=", "values=1|a"})
        CHECK_THROWS_AS_MESSAGE(parse_bounds(bad), std::invalid_argument, bad);
}

TEST_CASE("exit codes")
{
    CHECK(exit_code(RunResult::Proved) == 0);
    CHECK(exit_code(RunResult::ProvedWithResiduals) == 10);
    CHECK(exit_code(RunResult::Refuted) == 20);
    CHECK(exit_code(RunResult::Unknown) == 30);
    CHECK(exit_code(RunResult::SearchFailed) == 40);
    CHECK(exit_code(RunResult::UsageError) == 2);
}

TEST_CASE("check writes the witness files deterministically")
{
    TempDir a("a"), b("b");
    const std::string task = support::task_path("b1_ref_b3.task");
    const Cli first = run({"check", task, "--out-dir", a.str()});
    const Cli second = run({"check", task, "--out-dir", b.str()});
    CHECK(first.code == 0);
    CHECK(second.code == 0);
    CHECK(first.out.find("result: proved") != std::string::npos);
    CHECK(first.out.find("17 steps") != std::string::npos);

    for (const char* f : {"b1_ref_b3.trace", "b1_ref_b3.proof.txt", "b1_ref_b3.proof.thy-like"})
    {
        REQUIRE_MESSAGE(fs::exists(a.path / f), f);
        CHECK(support::read_file((a.path / f).string()) == support::read_file((b.path / f).string()));
    }
    const std::string trace = support::read_file((a.path / "b1_ref_b3.trace").string());
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 17);

    // the plain witness on disk replays
    const ProofWitness w = parse_plain(support::read_file((a.path / "b1_ref_b3.proof.txt").string()));
    CHECK(replay(w).empty());
}

TEST_CASE("check outcomes")
{
    TempDir d("outcomes");
    SUBCASE("refuted")
    {
        const Cli c = run({"check", support::task_path("refute.task"), "--out-dir", d.str()});
        CHECK(c.code == 20);
        CHECK(c.out.find("result: refuted") != std::string::npos);
        const fs::path cex = d.path / "refute.cex.txt";
        REQUIRE(fs::exists(cex));
        const std::string text = support::read_file(cex.string());
        CHECK(text.find("lhs outcome") != std::string::npos);
        CHECK(text.find("rhs outcome") != std::string::npos);
    }
    SUBCASE("no rule applies but the oracle agrees")
    {
        const Cli c = run({"check", support::task_path("b1_ref_b2.task"), "--out-dir", d.str()});
        CHECK(c.code == 40);
    }
    SUBCASE("residuals only with permission")
    {
        const std::string task = support::task_path("drop_disjunct.task");
        CHECK(run({"check", task, "--out-dir", d.str()}).code == 40);
        const Cli c = run({"check", task, "--allow-sorry", "--out-dir", d.str()});
        CHECK(c.code == 10);
        const std::string isar = support::read_file((d.path / "drop_disjunct.proof.thy-like").string());
        CHECK(isar.find("sorry") != std::string::npos);
    }
    SUBCASE("rule groups from the command line")
    {
        // without the sequential rules the running example cannot be split
        const Cli c = run({"check", support::task_path("b1_ref_b3.task"), "--rules", "core,assign", "--out-dir",
                           d.str()});
        CHECK(c.code == 40);
    }
    SUBCASE("first-found")
    {
        const Cli c = run({"check", support::task_path("b1_ref_b3.task"), "--first", "--out-dir", d.str()});
        CHECK(c.code == 0);
    }
}

TEST_CASE("oracle command")
{
    TempDir d("oracle");
    CHECK(run({"oracle", support::task_path("b1_ref_b3.task"), "--out-dir", d.str()}).code == 0);
    CHECK(run({"oracle", support::task_path("refute.task"), "--out-dir", d.str()}).code == 20);
    CHECK(fs::exists(d.path / "refute.cex.txt"));
    const Cli none = run({"oracle", support::task_path("b1_ref_b3.task"), "--bounds", "nodes=0", "--out-dir", d.str()});
    CHECK(none.code == 30);
}

TEST_CASE("rules commands")
{
    const Cli list = run({"rules", "list"});
    CHECK(list.code == 0);
    for (const auto& r : builtin_rules())
        CHECK(list.out.find(r.name) != std::string::npos);

    const Cli st = run({"rules", "selftest", "--n", "5", "--seed", "3"});
    CHECK(st.code == 0);
    CHECK(st.out.find("ref-pp-assign-corrupted") != std::string::npos);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"check"}).code == 2);
    CHECK(run({"check", "/nonexistent/x.task"}).code == 2);
    CHECK(run({"check", support::task_path("skip.task"), "--bounds", "nodes=x"}).code == 2);
    CHECK(run({"check", support::task_path("skip.task"), "--rules", "nonsense"}).code == 2);
    CHECK(run({"check", support::task_path("skip.task"), "--time-limit-ms", "0"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

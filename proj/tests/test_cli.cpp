#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "support/cases.hpp"
#include "support/scratch.hpp"
#include "tropf/io/case_file.hpp"
#include "tropf/io/cli.hpp"

using namespace tropf;

namespace {

const std::string kCase33 = std::string(TROPF_DATA_DIR) + "/case33.json";

struct Outcome {
    int code;
    std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tropf");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = io::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Exit status of the installed binary, run through the shell.
int run_binary(const std::string& args) {
    const std::string cmd = std::string(TROPF_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string small_case(const std::filesystem::path& dir) {
    auto c = fixture::five_node(2);
    c.storage.push_back(fixture::storage(3, 0.4, 3.0, 0.5));
    const auto path = (dir / "small.json").string();
    io::write_case(c, path);
    return path;
}

}  // namespace

TEST(Cli, ValidateShippedCase) {
    auto r = cli({"validate", kCase33});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("33 nodes"), std::string::npos);
}

TEST(Cli, ValidateReportsProblems) {
    auto dir = fixture::scratch_dir();
    auto c = fixture::five_node(1);
    c.storage.push_back(fixture::storage(3, 0.4, 3.0, 1.4));
    io::write_case(c, (dir / "bad.json").string());
    auto r = cli({"validate", (dir / "bad.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("storage 0"), std::string::npos);
}

TEST(Cli, MalformedCaseFileFails) {
    auto dir = fixture::scratch_dir();
    fixture::spit(dir / "broken.json", "{\n  \"base_mva\": 1,\n  \"nodes\": [\n");
    auto r = cli({"validate", (dir / "broken.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("parse error at line"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({"run", kCase33, "--out", "x", "--bogus"}).code, 2);
    EXPECT_EQ(cli({"run", kCase33}).code, 2);
    EXPECT_EQ(cli({"run", kCase33, "--mode", "weekly", "--out", "x"}).code, 2);
    EXPECT_EQ(cli({"run", kCase33, "--k", "-1", "--out", "x"}).code, 2);
    EXPECT_EQ(cli({"dump-lp", kCase33, "--stage", "4", "--out", "x"}).code, 2);
    auto r = cli({"run", kCase33, "--out", "x", "--bogus"});
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, HelpExitsZero) {
    auto r = cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("dump-lp"), std::string::npos);
}

TEST(Cli, RunWritesEveryArtifact) {
    auto dir = fixture::scratch_dir();
    auto r = cli({"run", small_case(dir), "--k", "1", "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"dispatch.csv", "attack.csv", "storage.csv", "state.csv", "violations.csv", "summary.json",
                          "timings.json", "attack_status.svg", "storage.svg", "voltage.svg", "flow.svg"})
        EXPECT_TRUE(std::filesystem::exists(dir / "out" / f)) << f;
    EXPECT_NE(r.out.find("stage3 objective"), std::string::npos);
}

TEST(Cli, RollingAndBinaryFlagsReachTheSummary) {
    auto dir = fixture::scratch_dir();
    auto r = cli({"run", small_case(dir), "--mode", "rolling", "--binary-attack", "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto summary = fixture::slurp(dir / "out" / "summary.json");
    EXPECT_NE(summary.find("\"mode\": \"rolling\""), std::string::npos);
    EXPECT_NE(summary.find("\"binary_attack\": true"), std::string::npos);
}

TEST(Cli, SweepWritesOneDirectoryPerBudget) {
    auto dir = fixture::scratch_dir();
    auto r = cli({"sweep", small_case(dir), "--k-max", "2", "--out", (dir / "sw").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* k : {"k0", "k1", "k2"}) EXPECT_TRUE(std::filesystem::exists(dir / "sw" / k / "summary.json")) << k;
    EXPECT_FALSE(std::filesystem::exists(dir / "sw" / "k3"));
}

TEST(Cli, DumpLpWritesEachStage) {
    auto dir = fixture::scratch_dir();
    const auto path = small_case(dir);
    const char* first_words[] = {"minimize:", "maximize:", "minimize:"};
    for (int stage = 1; stage <= 3; ++stage) {
        const auto out = dir / ("stage" + std::to_string(stage) + ".lp");
        auto r = cli({"dump-lp", path, "--stage", std::to_string(stage), "--out", out.string()});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto text = fixture::slurp(out);
        EXPECT_EQ(text.rfind(first_words[stage - 1], 0), 0u) << text.substr(0, 40);
        EXPECT_NE(text.find("vdrop["), std::string::npos);
    }
    EXPECT_NE(fixture::slurp(dir / "stage3.lp").find("binary: bch[3,t1]"), std::string::npos);
}

TEST(Cli, UndersizedStorageWithHardLimitsExitsOne) {
    auto dir = fixture::scratch_dir();
    auto c = io::load_case(kCase33);
    for (auto& u : c.storage) u.p_ch_max = u.p_dis_max = 0.0;
    io::write_case(c, (dir / "undersized.json").string());
    auto r = cli({"run", (dir / "undersized.json").string(), "--k", "3", "--hard-limits", "--out",
                  (dir / "r").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("stage3 infeasible"), std::string::npos) << r.err;
    // Stages 1 and 2 still produced their tables.
    EXPECT_NE(fixture::slurp(dir / "r" / "attack.csv").find("\n4,1,"), std::string::npos);
}

TEST(Cli, ZeroBudgetOnShippedCase) {
    auto dir = fixture::scratch_dir();
    auto r = cli({"run", kCase33, "--k", "0", "--mode", "full", "--out", (dir / "r").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream attack(fixture::slurp(dir / "r" / "attack.csv"));
    std::string line;
    std::getline(attack, line);
    int rows = 0;
    while (std::getline(attack, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
    }
    EXPECT_EQ(rows, 5 * 24);
}

TEST(Cli, IdenticalRunsGiveIdenticalFiles) {
    auto dir = fixture::scratch_dir();
    const auto path = small_case(dir);
    ASSERT_EQ(cli({"run", path, "--k", "2", "--out", (dir / "a").string()}).code, 0);
    ASSERT_EQ(cli({"run", path, "--k", "2", "--out", (dir / "b").string()}).code, 0);
    for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
        const auto name = entry.path().filename();
        if (name == "timings.json") continue;
        EXPECT_EQ(fixture::slurp(dir / "a" / name), fixture::slurp(dir / "b" / name)) << name;
    }
}

TEST(CliBinary, ExitCodes) {
    auto dir = fixture::scratch_dir();
    EXPECT_EQ(run_binary("validate " + kCase33), 0);
    EXPECT_EQ(run_binary("run " + kCase33 + " --nonsense"), 2);
    EXPECT_EQ(run_binary("validate " + (dir / "missing.json").string()), 1);
    EXPECT_EQ(run_binary("run " + small_case(dir) + " --out " + (dir / "o").string()), 0);
}

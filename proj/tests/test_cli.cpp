#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(PBQC_CLI) + " " + args + " 2>&1";
    Outcome o;
    FILE* p = popen(cmd.c_str(), "r");
    std::array<char, 512> buf{};
    while (p && fgets(buf.data(), buf.size(), p)) o.out += buf.data();
    const int status = pclose(p);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::string temp(const std::string& name, const std::string& text) {
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST(Cli, UsageErrors) {
    auto o = run("");
    EXPECT_EQ(o.code, 1);
    EXPECT_EQ(o.out.rfind("error: usage:", 0), 0u) << o.out;
    o = run("run");
    EXPECT_EQ(o.code, 1);
    o = run("cost tree n=1 k=3 --format xml");
    EXPECT_EQ(o.code, 1);
}

TEST(Cli, ValidationErrorsAreSingleLine) {
    const auto bad = temp("bad.cfg", "schema = 1\nwhat = 3\n");
    auto o = run("run " + bad);
    EXPECT_EQ(o.code, 2);
    EXPECT_EQ(o.out.rfind("error: validation: line 2", 0), 0u) << o.out;
    EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 1);
    o = run("cost tree n=1");
    EXPECT_EQ(o.code, 2);
    o = run("sk-compile 1 0 0 0 0 0 2 0");
    EXPECT_EQ(o.code, 2);
}

TEST(Cli, RunCostCompare) {
    const auto cfg = temp("tree.cfg", "schema = 1\nfamily = c3\nactor = tree:3\ntrials = 20\n");
    const std::string result = ::testing::TempDir() + "tree.json";
    auto o = run("run " + cfg + " --out " + result + " --seed 4");
    ASSERT_EQ(o.code, 0) << o.out;
    EXPECT_NE(o.out.find("\"win_rate\": 1.0"), std::string::npos);
    const std::string cost = ::testing::TempDir() + "cost.json";
    ASSERT_EQ(run("cost tree n=1 k=3 --out " + cost).code, 0);
    EXPECT_EQ(run("compare " + result + " " + cost).code, 0);
    const auto fake = temp("fake.json", R"({"reserved_epr": "20"})");
    o = run("compare " + fake + " " + cost);
    EXPECT_EQ(o.code, 3);
    EXPECT_NE(o.out.find("error: bound:"), std::string::npos);
}

TEST(Cli, BenchAndPlot) {
    const std::string bench = ::testing::TempDir() + "bench.json";
    ASSERT_EQ(run("pbt-bench --ports 4,8 --trials 100 --out " + bench).code, 0);
    const auto o = run("plot " + bench + " --axes num_ports,mean");
    EXPECT_EQ(o.code, 0);
    EXPECT_EQ(o.out.rfind("num_ports,mean\n4,", 0), 0u) << o.out;
    EXPECT_EQ(run("plot --axes a,a").code, 2);
    EXPECT_EQ(run("sk-compile 1,0,0,0,0,0,1,0 --depth 1").code, 0);
}

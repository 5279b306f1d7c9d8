#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(RAMSEY_FORGE_BIN) + " " + args + " 2>/dev/null";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    for (std::size_t got; (got = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("ramsey_forge_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("run --n 3").code, 64);
    EXPECT_EQ(run("run").code, 64);
    EXPECT_EQ(run("run --n 20 --epsilon 1.5").code, 64);
    EXPECT_EQ(run("run --n 20 --on-no-pair maybe").code, 64);
    EXPECT_EQ(run("run --n 20 --stop soon").code, 64);
    EXPECT_EQ(run("frobnicate").code, 64);
    EXPECT_EQ(run("").code, 64);
}

TEST(Cli, RunIsDeterministic) {
    const auto a = scratch("a"), b = scratch("b");
    const Result ra = run("run --n 30 --seed 5 --out " + a.string());
    const Result rb = run("run --n 30 --seed 5 --out " + b.string());
    ASSERT_EQ(ra.code, 0);
    ASSERT_EQ(rb.code, 0);
    EXPECT_EQ(slurp(a / "coloring.txt"), slurp(b / "coloring.txt"));
    const auto report = nlohmann::json::parse(ra.out);
    EXPECT_EQ(report["validation"]["violations"], 0);
    EXPECT_EQ(report["config"]["on_no_pair"], "skip");
    EXPECT_EQ(run("validate " + (a / "coloring.txt").string()).code, 0);
}

TEST(Cli, TrajTable) {
    const Result r = run("traj --epsilon 0.1 --points 50");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,p,r,q,y,a,c1,c2,c,d,z0,z1,z2");
    int rows = 0;
    while (std::getline(in, line)) rows += !line.empty();
    EXPECT_EQ(rows, 50);
    const Result with_n = run("traj --points 5 --n 1000000");
    ASSERT_EQ(with_n.code, 0);
    EXPECT_NE(with_n.out.find("log_g_q"), std::string::npos);
}

TEST(Cli, ValidateFiles) {
    const auto dir = scratch("validate");
    std::ofstream(dir / "rainbow.txt") << "n 4 colors 6\n0 1 0\n0 2 1\n0 3 2\n1 2 3\n1 3 4\n2 3 5\n";
    const Result ok = run("validate " + (dir / "rainbow.txt").string());
    EXPECT_EQ(ok.code, 0);
    EXPECT_EQ(nlohmann::json::parse(ok.out)["violations"], 0);

    std::ofstream(dir / "proper3.txt") << "n 4 colors 3\n0 1 0\n2 3 0\n0 2 1\n1 3 1\n0 3 2\n1 2 2\n";
    const Result bad = run("validate --mode pairwise " + (dir / "proper3.txt").string());
    EXPECT_EQ(bad.code, 2);
    EXPECT_EQ(nlohmann::json::parse(bad.out)["violations"], 1);

    std::ofstream(dir / "corrupt.txt") << "n 4 colours 3\n0 1 0\n";
    EXPECT_EQ(run("validate " + (dir / "corrupt.txt").string()).code, 2);
    std::ofstream(dir / "partial.txt") << "n 4 colors 3\n0 1 0\n";
    EXPECT_EQ(run("validate " + (dir / "partial.txt").string()).code, 2);
    EXPECT_EQ(run("validate " + (dir / "missing.txt").string()).code, 2);
}

TEST(Cli, SweepWritesAggregate) {
    const auto dir = scratch("sweep");
    const Result r = run("sweep --n 20 --seeds 2,1 --out " + dir.string());
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["seeds"], (std::vector<int>{1, 2}));
    EXPECT_TRUE(std::filesystem::exists(dir / "seed_1" / "report.json"));
}

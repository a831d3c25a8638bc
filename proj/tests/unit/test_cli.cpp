#include <coresched/cli.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace coresched;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string scenario_file(const std::string& name) { return std::string(CORESCHED_SCENARIO_DIR) + "/" + name; }

} // namespace

TEST(Cli, ScenarioList) {
    const auto r = cli({"scenario", "list"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "fig1\nfig2\nfig3\nfig4\n");
}

TEST(Cli, UnknownScenarioIsUsageError) {
    const auto r = cli({"scenario", "show", "fig9"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("fig1"), std::string::npos);
    EXPECT_EQ(cli({"simulate", "--scenario", "nope"}).code, kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
}

TEST(Cli, VerifyExitCodes) {
    EXPECT_EQ(cli({"verify", "--scenario", "fig3", "--eta", "0.5", "--kappa", "0.6"}).code, kExitOk);
    EXPECT_EQ(cli({"verify", "--scenario", "fig3", "--eta", "0.5", "--kappa", "0.8"}).code, kExitNotLearnable);
    EXPECT_EQ(cli({"verify", "--scenario", "fig3", "--kappa", "1.5"}).code, kExitUsage);
}

TEST(Cli, InvalidScenarioFileExitsThree) {
    const auto r = cli({"simulate", "--scenario", scenario_file("../tests/data/bad_deadline.json")});
    EXPECT_EQ(r.code, kExitInvalidScenario);
    EXPECT_NE(r.err.find("bundle.threads[0]"), std::string::npos);
}

TEST(Cli, SimulateIsDeterministic) {
    const std::vector<std::string> args = {"simulate", "--scenario", scenario_file("bernoulli.json"), "--seed", "5"};
    const auto a = cli(args);
    const auto b = cli(args);
    EXPECT_EQ(a.code, kExitOk);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, cli({"simulate", "--scenario", scenario_file("bernoulli.json"), "--seed", "6"}).out);
}

TEST(Cli, OracleRespectsLimits) {
    auto r = cli({"oracle", "--scenario", "fig2", "--eta", "1", "--quantum", "2"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("K=5"), std::string::npos);
}

TEST(Cli, CompareListsEveryStrategy) {
    const auto r = cli({"compare", "--scenario", "fig4", "--strategies", "uniform,adaptive"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("strategy,kappa,average_error\n", 0), 0u);
    EXPECT_NE(r.out.find("uniform,0,"), std::string::npos);
    EXPECT_NE(r.out.find("adaptive,0.5,"), std::string::npos);
}

TEST(Cli, FrontierForUniform) {
    const auto r = cli({"frontier", "--scenario", "fig2", "--eta-grid", "0.5,1", "--strategy", "uniform"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("1,0.6"), std::string::npos);
}

#include <coresched/error.hpp>
#include <coresched/scenario.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace coresched;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fig3_text() { return serialize_scenario(builtin_scenario("fig3")); }

ScenarioError parse_error(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e;
    }
    ADD_FAILURE() << "expected ScenarioError";
    return ScenarioError(ScenarioError::Kind::syntax, "", "");
}

void replace_once(std::string& s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    ASSERT_NE(pos, std::string::npos) << from;
    s.replace(pos, from.size(), to);
}

} // namespace

TEST(Scenario, BuiltinsRoundTrip) {
    for (const auto& name : builtin_scenario_names()) {
        const auto doc = builtin_scenario(name);
        const auto text = serialize_scenario(doc);
        EXPECT_EQ(parse_scenario(text), doc) << name;
        EXPECT_EQ(serialize_scenario(parse_scenario(text)), text) << name;
    }
}

TEST(Scenario, ShippedFilesMatchBuiltins) {
    for (const auto& name : builtin_scenario_names()) {
        const auto text = read_file(std::string(CORESCHED_SCENARIO_DIR) + "/" + name + ".json");
        EXPECT_EQ(parse_scenario(text), builtin_scenario(name)) << name;
    }
    const auto bern = parse_scenario(read_file(std::string(CORESCHED_SCENARIO_DIR) + "/bernoulli.json"));
    EXPECT_EQ(bern.bundle.threads.at(0).curve.noise_sigma, 0.07430331813832664);
    EXPECT_EQ(bern.strategy.adaptive.lookback, 2);
}

TEST(Scenario, UnknownBuiltinListsNames) {
    try {
        builtin_scenario("fig9");
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("fig1"), std::string::npos);
    }
}

TEST(Scenario, UnknownFieldIsRejectedWithPath) {
    auto text = fig3_text();
    replace_once(text, "\"horizon\": 10", "\"horizon\": 10, \"horizn\": 3");
    const auto e = parse_error(text);
    EXPECT_EQ(e.kind(), ScenarioError::Kind::schema);
    EXPECT_EQ(e.path(), "bundle.horizn");
}

TEST(Scenario, MissingFieldNamesThePath) {
    auto text = fig3_text();
    replace_once(text, "\"deadline\": 4,", "");
    const auto e = parse_error(text);
    EXPECT_EQ(e.kind(), ScenarioError::Kind::schema);
    EXPECT_EQ(e.path(), "bundle.threads[0].deadline");
}

TEST(Scenario, WrongTypeIsASchemaError) {
    auto text = fig3_text();
    replace_once(text, "\"horizon\": 10", "\"horizon\": \"ten\"");
    const auto e = parse_error(text);
    EXPECT_EQ(e.kind(), ScenarioError::Kind::schema);
    EXPECT_EQ(e.path(), "bundle.horizon");
}

TEST(Scenario, SyntaxErrorCarriesLineAndColumn) {
    const auto e = parse_error("{\n  \"schema_version\": \"core-scenario/1\",\n  \"bundle\": [1,,2]\n}");
    EXPECT_EQ(e.kind(), ScenarioError::Kind::syntax);
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 1);
}

TEST(Scenario, SemanticErrorsAreReported) {
    auto text = fig3_text();
    replace_once(text, "\"deadline\": 4", "\"deadline\": 11");
    auto e = parse_error(text);
    EXPECT_EQ(e.kind(), ScenarioError::Kind::semantic);
    EXPECT_EQ(e.path(), "bundle.threads[0].deadline");

    text = fig3_text();
    replace_once(text, "\"eta_cap\": 0.5", "\"eta_cap\": 1.5");
    e = parse_error(text);
    EXPECT_EQ(e.kind(), ScenarioError::Kind::semantic);

    text = fig3_text();
    replace_once(text, "core-scenario/1", "core-scenario/2");
    e = parse_error(text);
    EXPECT_EQ(e.path(), "schema_version");
}

TEST(Scenario, ContentHashTracksTheBundle) {
    auto a = builtin_scenario("fig2").bundle;
    const auto h = bundle_content_hash(a);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h, bundle_content_hash(builtin_scenario("fig2").bundle));
    a.resources.capacities[0] = 61.0;
    EXPECT_NE(h, bundle_content_hash(a));
}

#include <coresched/bundle.hpp>
#include <coresched/error.hpp>

#include <gtest/gtest.h>

using namespace coresched;

namespace {

TaskBundle small_bundle() {
    TaskBundle b;
    b.horizon = 4;
    b.resources.capacities = {10.0, 10.0, 10.0, 10.0};
    for (auto [id, begin, deadline] : {std::tuple{1, 1, 2}, std::tuple{2, 2, 4}, std::tuple{3, 4, 4}}) {
        ThreadSpec th;
        th.id = id;
        th.begin = begin;
        th.deadline = deadline;
        th.curve.need = 10.0;
        b.threads.push_back(th);
    }
    return b;
}

} // namespace

TEST(Bundle, AliveSetFollowsLifespans) {
    const auto b = small_bundle();
    EXPECT_EQ(alive_set(b, 1), (std::vector<ThreadId>{1}));
    EXPECT_EQ(alive_set(b, 2), (std::vector<ThreadId>{1, 2}));
    EXPECT_EQ(alive_set(b, 3), (std::vector<ThreadId>{2}));
    EXPECT_EQ(alive_set(b, 4), (std::vector<ThreadId>{2, 3}));
    EXPECT_THROW(alive_set(b, 0), UsageError);
    EXPECT_THROW(alive_set(b, 5), UsageError);
}

TEST(Bundle, ValidBundleHasNoViolations) { EXPECT_TRUE(validate_bundle(small_bundle()).empty()); }

TEST(Bundle, BeginAfterDeadlineIsReported) {
    auto b = small_bundle();
    b.threads[1].begin = 4;
    b.threads[1].deadline = 3;
    const auto report = validate_bundle(b);
    ASSERT_FALSE(report.empty());
    EXPECT_EQ(report.front().thread_id, 2);
    EXPECT_NE(report.front().message.find("begin > deadline"), std::string::npos);
    EXPECT_THROW(require_valid(b), ValidationError);
}

TEST(Bundle, ReportsEveryProblem) {
    auto b = small_bundle();
    b.resources.capacities[2] = -1.0;
    b.threads[0].deadline = 9;
    b.threads[2].id = 7;
    const auto report = validate_bundle(b);
    EXPECT_GE(report.size(), 3u);
}

TEST(Bundle, ProfileLengthMustMatchHorizon) {
    auto b = small_bundle();
    b.resources.capacities.pop_back();
    EXPECT_FALSE(validate_bundle(b).empty());
}

TEST(Bundle, ArrivalCapForms) {
    ThreadSpec th;
    EXPECT_TRUE(std::isinf(th.arrival_cap_at(1)));
    th.arrival_cap = {5.0};
    EXPECT_EQ(th.arrival_cap_at(3), 5.0);
    th.arrival_cap = {1.0, 2.0, 3.0};
    EXPECT_EQ(th.arrival_cap_at(2), 2.0);
}

TEST(Bundle, AllocationRowDefaultsToZero) {
    AllocationRow row;
    row.fractions = {{1, 0.25}, {3, 0.5}};
    EXPECT_EQ(row.fraction(2), 0.0);
    EXPECT_EQ(row.sum(), 0.75);
}

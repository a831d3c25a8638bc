#include <coresched/learnability.hpp>
#include <coresched/scenario.hpp>
#include <coresched/trace_io.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace coresched;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

Trace fig(const std::string& name) {
    const auto doc = builtin_scenario(name);
    return run(doc.bundle, doc.strategy, doc.params);
}

} // namespace

TEST(TraceIo, CsvLayout) {
    const auto trace = fig("fig1");
    const auto l = lines(write_trace(trace, TraceFormat::csv));
    ASSERT_EQ(l.size(), 5u);
    EXPECT_EQ(l[0], kTraceCsvHeader);
    EXPECT_EQ(l[1], "1,1,1,64,64,64,0.99936,0.99936,,");
    EXPECT_EQ(l[4], ",1,,,,,0.99744,,fail-deadline,");
}

TEST(TraceIo, CsvOutcomeRowsCarrySwitchingTime) {
    const auto l = lines(write_trace(fig("fig3"), TraceFormat::csv));
    EXPECT_EQ(l[l.size() - 5], ",1,,,,,0,,success,3");
    EXPECT_EQ(l[l.size() - 4], ",2,,,,,0.75,,fail-error,");
}

TEST(TraceIo, StructuredRoundTrip) {
    for (const auto& name : builtin_scenario_names()) {
        const auto trace = fig(name);
        const auto text = write_trace(trace, TraceFormat::structured);
        const auto back = parse_trace(text);
        EXPECT_EQ(back, trace) << name;
        EXPECT_EQ(write_trace(back, TraceFormat::structured), text) << name;
    }
}

TEST(TraceIo, RuntimeOnlyWhenAsked) {
    const auto trace = fig("fig2");
    EXPECT_EQ(write_trace(trace, TraceFormat::structured).find("runtime_ms"), std::string::npos);
    EXPECT_NE(write_trace(trace, TraceFormat::structured, true).find("runtime_ms"), std::string::npos);
}

TEST(TraceIo, VerdictRoundTrip) {
    const auto trace = fig("fig3");
    VerifyParams p;
    p.eta = 0.5;
    p.kappa = 0.6;
    const auto v = verify(trace, p);
    EXPECT_EQ(parse_verdict(write_verdict(v)), v);
}

TEST(TraceIo, ShortestDoubles) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(64.0), "64");
    EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
    EXPECT_EQ(trace_format_from_string("csv"), TraceFormat::csv);
}

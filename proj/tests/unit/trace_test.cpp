#include <gtest/gtest.h>

#include <sstream>

#include "rbt/trace.hpp"

using namespace rbt;

namespace {

std::vector<TraceOp> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

std::size_t error_line(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const TraceParseError& e) {
        return e.line();
    }
    ADD_FAILURE() << "expected a parse error";
    return 0;
}

}  // namespace

TEST(Trace, ParsesAllVerbs) {
    const auto ops = parse("i 5 17\ni -3\nd 5\nq -3\nm\nf\n");
    ASSERT_EQ(ops.size(), 6u);
    EXPECT_EQ(ops[0], (TraceOp{TraceOp::Verb::Insert, 5, 17, 1}));
    EXPECT_EQ(ops[1].key, -3);
    EXPECT_EQ(ops[1].payload, 0u);
    EXPECT_EQ(ops[2].verb, TraceOp::Verb::Delete);
    EXPECT_EQ(ops[3].verb, TraceOp::Verb::Search);
    EXPECT_EQ(ops[4].verb, TraceOp::Verb::DeleteMin);
    EXPECT_EQ(ops[5].verb, TraceOp::Verb::Flush);
    EXPECT_EQ(ops[5].line, 6u);
}

TEST(Trace, SkipsBlankAndCommentLines) {
    const auto ops = parse("# header\n\n   \ni 1\n# trailing\n");
    ASSERT_EQ(ops.size(), 1u);
    EXPECT_EQ(ops[0].line, 4u);
}

TEST(Trace, FullSigned64BitRange) {
    const auto ops = parse("i -9223372036854775808\nq 9223372036854775807\n");
    EXPECT_EQ(ops[0].key, std::numeric_limits<Key>::min());
    EXPECT_EQ(ops[1].key, std::numeric_limits<Key>::max());
}

TEST(Trace, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("i 1\nx 3\n"), 2u);
    EXPECT_EQ(error_line("i\n"), 1u);
    EXPECT_EQ(error_line("i 1\ni 2\nd 1 2\n"), 3u);
    EXPECT_EQ(error_line("q abc\n"), 1u);
    EXPECT_EQ(error_line("i 9223372036854775808\n"), 1u);
    EXPECT_EQ(error_line("m 4\n"), 1u);
}

TEST(Trace, FormatRoundTrips) {
    const auto ops = parse("i 5 17\nd 5\nq 2\nm\nf\n");
    const auto again = parse(format_trace(ops));
    ASSERT_EQ(again.size(), ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        EXPECT_EQ(again[i].verb, ops[i].verb);
        EXPECT_EQ(again[i].key, ops[i].key);
        EXPECT_EQ(again[i].payload, ops[i].payload);
    }
}

#include <gtest/gtest.h>

#include "rbt/reference.hpp"

using namespace rbt;

namespace {

IssuedOp op(TraceOp::Verb verb, Ticket t, Key k, Payload p = 0) { return IssuedOp{verb, t, k, p}; }

Element data(Ticket t, Key k, Payload p = 0) { return Element{k, 1, ElementKind::Data, p, t, 0}; }

}  // namespace

TEST(Reference, AcceptsCorrectAnswers) {
    const std::vector<IssuedOp> ops{op(TraceOp::Verb::Insert, 1, 5, 50), op(TraceOp::Verb::Search, 2, 5),
                                    op(TraceOp::Verb::Delete, 3, 5), op(TraceOp::Verb::Search, 4, 5)};
    const std::vector<ResultEvent> answers{{2, Outcome::Found, 5, 50, 1, 0},
                                           {3, Outcome::Deleted, 5, 50, 1, 0},
                                           {4, Outcome::NotFound, 5, 0, 0, 0}};
    const auto report = verify_against_reference(ops, answers, {});
    EXPECT_TRUE(report.ok()) << report.mismatches.front();
    EXPECT_EQ(report.checked, 3u);  // answers checked
}

TEST(Reference, FlagsWrongOutcome) {
    const std::vector<IssuedOp> ops{op(TraceOp::Verb::Insert, 1, 5), op(TraceOp::Verb::Search, 2, 5)};
    const std::vector<ResultEvent> answers{{2, Outcome::NotFound, 5, 0, 0, 0}};
    const std::vector<Element> stored{data(1, 5)};
    EXPECT_FALSE(verify_against_reference(ops, answers, stored).ok());
}

TEST(Reference, FlagsMatchAgainstLaterInsert) {
    const std::vector<IssuedOp> ops{op(TraceOp::Verb::Search, 1, 5), op(TraceOp::Verb::Insert, 2, 5)};
    const std::vector<ResultEvent> answers{{1, Outcome::Found, 5, 0, 2, 0}};
    EXPECT_FALSE(verify_against_reference(ops, answers, std::vector<Element>{data(2, 5)}).ok());
}

TEST(Reference, FlagsMissingAndDuplicateAnswers) {
    const std::vector<IssuedOp> ops{op(TraceOp::Verb::Search, 1, 5), op(TraceOp::Verb::Search, 2, 6)};
    const std::vector<ResultEvent> dup{{1, Outcome::NotFound, 5, 0, 0, 0}, {1, Outcome::NotFound, 5, 0, 0, 0}};
    EXPECT_FALSE(verify_against_reference(ops, dup, {}).ok());
}

TEST(Reference, FlagsWrongMinimum) {
    const std::vector<IssuedOp> ops{op(TraceOp::Verb::Insert, 1, 5), op(TraceOp::Verb::Insert, 2, 3),
                                    op(TraceOp::Verb::DeleteMin, 3, 0)};
    const std::vector<ResultEvent> answers{{3, Outcome::Min, 5, 0, 1, 0}};
    EXPECT_FALSE(verify_against_reference(ops, answers, std::vector<Element>{data(2, 3)}).ok());
}

TEST(Reference, FlagsLostData) {
    const std::vector<IssuedOp> ops{op(TraceOp::Verb::Insert, 1, 5)};
    EXPECT_FALSE(verify_against_reference(ops, {}, {}).ok());
    EXPECT_TRUE(verify_against_reference(ops, {}, std::vector<Element>{data(1, 5)}).ok());
}

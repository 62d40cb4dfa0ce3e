#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbt/buffer_tree.hpp"
#include "rbt/result.hpp"
#include "rbt/trace.hpp"

namespace rbt {

/// An operation as issued to a tree, with the ticket the tree assigned.
struct IssuedOp {
    TraceOp::Verb verb = TraceOp::Verb::Insert;
    Ticket ticket = 0;
    Key key = 0;
    Payload payload = 0;
};

/// In-memory multiset dictionary / priority queue used as the independent
/// reference. Operations are applied in ticket order; each answer the tree
/// gave is checked against the reference state at that point.
///
/// A tree may legitimately resolve a delete against any live duplicate
/// inserted before the delete, so the reference follows the duplicate the
/// tree names in `ResultEvent::matched` after validating it.
class ReferenceModel {
public:
    void insert(Ticket ticket, Key key, Payload payload);

    /// Returns a description of the mismatch, or nullopt if `answer` is a
    /// correct outcome for `op` in the current reference state. Applies the
    /// operation either way.
    std::optional<std::string> apply(const IssuedOp& op, const ResultEvent& answer);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::optional<Key> min_key() const;
    [[nodiscard]] std::vector<Ticket> live_tickets() const;

private:
    std::map<Key, std::map<Ticket, Payload>> live_;
    std::size_t size_ = 0;
};

struct OracleReport {
    std::size_t checked = 0;
    std::vector<std::string> mismatches;

    [[nodiscard]] bool ok() const noexcept { return mismatches.empty(); }
};

/// Replays `ops` through a ReferenceModel and checks every answer in
/// `answers` (any order; matched to ops by ticket), that each operation got
/// exactly one answer, and that `stored` (the tree's DATA) equals the
/// reference contents.
[[nodiscard]] OracleReport verify_against_reference(std::span<const IssuedOp> ops,
                                                    std::span<const ResultEvent> answers,
                                                    std::span<const Element> stored);

/// Every DATA element held by the tree: buffers, staging and min-cache.
[[nodiscard]] std::vector<Element> stored_data(const BufferTree& tree);

/// Issues a trace to a tree, collecting tickets and all answers (polled
/// results and deletemin returns). Does not flush at the end.
struct ReplayLog {
    std::vector<IssuedOp> ops;
    std::vector<ResultEvent> answers;
};
ReplayLog replay(BufferTree& tree, std::span<const TraceOp> trace);

}  // namespace rbt

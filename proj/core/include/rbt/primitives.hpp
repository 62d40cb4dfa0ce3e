#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rbt/element.hpp"
#include "rbt/result.hpp"

namespace rbt {

class CannotSplit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Child index for `key`: the number of separators <= key, so a key equal
/// to a separator goes to the gap on its right.
[[nodiscard]] std::size_t route(std::span<const Key> separators, Key key) noexcept;

/// Separator keys for a leaf that is about to acquire children: the DATA
/// keys at ranks ceil(i*n/f), i = 1..f-1, of the key-sorted DATA elements,
/// with duplicates collapsed. Throws CannotSplit when there is no DATA.
[[nodiscard]] std::vector<Key> choose_separators(std::span<const Element> elements, std::size_t fanout);

/// Called for each DATA element a SEARCH matches; may rewrite its priority.
using MatchHook = std::function<void(Element&)>;

struct AnnihilationResult {
    std::vector<Element> survivors;
    std::vector<ResultEvent> results;
};

/// Resolves co-resident operation elements against DATA elements of the same
/// key, in ticket order. An operation only matches DATA with a smaller ticket
/// (inserted before it was issued). A DELETE consumes the oldest eligible
/// duplicate; a SEARCH reports the oldest eligible duplicate and leaves it in
/// place. Unmatched operations survive. `depth` is copied into every result.
///
/// Survivors come back in key-then-ticket order; callers re-sort by priority.
[[nodiscard]] AnnihilationResult annihilate(std::vector<Element> loaded, std::uint32_t depth = 0,
                                            const MatchHook& on_search_match = {});

/// Converts every unmatched operation element into its miss result
/// (NotFound / DeleteNotFound) and removes it from `elements`.
void resolve_as_missing(std::vector<Element>& elements, std::uint32_t depth, std::vector<ResultEvent>& out);

}  // namespace rbt

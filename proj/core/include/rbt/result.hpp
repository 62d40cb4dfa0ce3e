#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rbt/element.hpp"

namespace rbt {

enum class Outcome : std::uint8_t {
    Found,
    NotFound,
    Deleted,
    DeleteNotFound,
    Min,
    Empty,  // deletemin on an empty structure
};

std::string_view to_string(Outcome outcome) noexcept;

/// A lazily produced answer to a search, delete or deletemin.
///
/// `matched` is the ticket of the DATA element the operation resolved
/// against (Found, Deleted, Min). `depth` is the tree level of the buffer in
/// which the match or the miss was decided; answers served from main memory
/// (staging or the min-cache) report depth 0.
struct ResultEvent {
    Ticket ticket = 0;
    Outcome outcome = Outcome::NotFound;
    Key key = 0;
    Payload payload = 0;
    Ticket matched = 0;
    std::uint32_t depth = 0;

    friend bool operator==(const ResultEvent&, const ResultEvent&) = default;
};

std::string describe(const ResultEvent& event);
std::ostream& operator<<(std::ostream& os, const ResultEvent& event);

}  // namespace rbt

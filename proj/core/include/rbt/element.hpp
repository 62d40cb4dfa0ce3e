#pragma once

#include <cstdint>
#include <string_view>
#include <tuple>

namespace rbt {

using Key = std::int64_t;
using Priority = std::uint64_t;
using Payload = std::uint64_t;
using Ticket = std::uint64_t;

enum class ElementKind : std::uint8_t { Data, Delete, Search };

std::string_view to_string(ElementKind kind) noexcept;

/// The unit stored in node buffers. Operations travel through the tree as
/// elements too: DELETE and SEARCH carry priority zero and sink until they
/// meet a matching DATA element or fall off a leaf.
struct Element {
    Key key = 0;
    Priority priority = 0;
    ElementKind kind = ElementKind::Data;
    Payload payload = 0;
    Ticket ticket = 0;
    // Counter-reset epoch at which `priority` was last normalized. Only
    // meaningful in counter mode.
    std::uint32_t epoch = 0;

    [[nodiscard]] bool is_data() const noexcept { return kind == ElementKind::Data; }
    [[nodiscard]] bool is_op() const noexcept { return kind != ElementKind::Data; }

    friend bool operator==(const Element&, const Element&) = default;
};

/// Strict total order used for every "largest priority" decision:
/// (priority, key, ticket) lexicographic. Tickets are unique, so no two
/// elements compare equal.
[[nodiscard]] inline bool higher_priority(const Element& a, const Element& b) noexcept {
    return std::tie(a.priority, a.key, a.ticket) > std::tie(b.priority, b.key, b.ticket);
}

struct HigherPriority {
    bool operator()(const Element& a, const Element& b) const noexcept { return higher_priority(a, b); }
};

/// Key order with ticket tie-break.
struct KeyThenTicket {
    bool operator()(const Element& a, const Element& b) const noexcept {
        return std::tie(a.key, a.ticket) < std::tie(b.key, b.ticket);
    }
};

}  // namespace rbt

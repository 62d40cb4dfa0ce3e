#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rbt/element.hpp"

namespace rbt {

/// Main-memory prefix of the globally smallest DATA keys, used to answer
/// deletemin without I/O. Entries are kept in (key, ticket) order. The owner
/// is responsible for the prefix property: every cached key is <= every
/// DATA key still held in external memory.
class MinCache {
public:
    explicit MinCache(std::size_t capacity = 0) : capacity_(capacity) {}

    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] std::span<const Element> entries() const noexcept { return entries_; }

    /// Largest cached key. Requires !empty().
    [[nodiscard]] Key max_key() const { return entries_.back().key; }

    /// Whether an inserted key belongs in the cache rather than the tree.
    [[nodiscard]] bool admits(Key key) const noexcept { return !entries_.empty() && key <= entries_.back().key; }

    /// Adds `e`; if that exceeds capacity, the largest entry is evicted and
    /// returned so the caller can send it back to external memory.
    std::optional<Element> insert(const Element& e);

    /// Removes the oldest cached entry with this key, if any.
    std::optional<Element> remove_one(Key key);

    [[nodiscard]] const Element* find(Key key) const noexcept;

    Element pop_min();

    /// Replaces the contents (used on refill). `elements` need not be sorted
    /// and must fit the capacity.
    void assign(std::vector<Element> elements);

private:
    std::size_t capacity_;
    std::vector<Element> entries_;
};

}  // namespace rbt

#include "rbt/min_cache.hpp"

#include <algorithm>
#include <cassert>

namespace rbt {

namespace {

auto lower_bound_key(auto& entries, Key key) {
    return std::lower_bound(entries.begin(), entries.end(), key,
                            [](const Element& e, Key k) { return e.key < k; });
}

}  // namespace

std::optional<Element> MinCache::insert(const Element& e) {
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), e, KeyThenTicket{});
    entries_.insert(pos, e);
    if (entries_.size() <= capacity_) return std::nullopt;
    Element evicted = entries_.back();
    entries_.pop_back();
    return evicted;
}

std::optional<Element> MinCache::remove_one(Key key) {
    auto it = lower_bound_key(entries_, key);
    if (it == entries_.end() || it->key != key) return std::nullopt;
    Element removed = *it;
    entries_.erase(it);
    return removed;
}

const Element* MinCache::find(Key key) const noexcept {
    auto it = lower_bound_key(entries_, key);
    if (it == entries_.end() || it->key != key) return nullptr;
    return &*it;
}

Element MinCache::pop_min() {
    assert(!entries_.empty());
    Element e = entries_.front();
    entries_.erase(entries_.begin());
    return e;
}

void MinCache::assign(std::vector<Element> elements) {
    assert(elements.size() <= capacity_);
    entries_ = std::move(elements);
    std::sort(entries_.begin(), entries_.end(), KeyThenTicket{});
}

}  // namespace rbt

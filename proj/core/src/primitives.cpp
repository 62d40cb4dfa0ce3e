#include "rbt/primitives.hpp"

#include <algorithm>
#include <deque>

namespace rbt {

std::size_t route(std::span<const Key> separators, Key key) noexcept {
    return static_cast<std::size_t>(std::upper_bound(separators.begin(), separators.end(), key) -
                                    separators.begin());
}

std::vector<Key> choose_separators(std::span<const Element> elements, std::size_t fanout) {
    std::vector<Key> keys;
    keys.reserve(elements.size());
    for (const Element& e : elements) {
        if (e.is_data()) keys.push_back(e.key);
    }
    if (keys.empty()) throw CannotSplit("choose_separators: no DATA elements to split on");
    std::sort(keys.begin(), keys.end());

    const std::size_t n = keys.size();
    std::vector<Key> separators;
    separators.reserve(fanout - 1);
    for (std::size_t i = 1; i < fanout; ++i) {
        const std::size_t rank = (i * n + fanout - 1) / fanout;  // 1-based
        const Key k = keys[rank - 1];
        if (separators.empty() || k > separators.back()) separators.push_back(k);
    }
    return separators;
}

AnnihilationResult annihilate(std::vector<Element> loaded, std::uint32_t depth, const MatchHook& on_search_match) {
    AnnihilationResult out;
    std::sort(loaded.begin(), loaded.end(), KeyThenTicket{});

    std::vector<bool> consumed(loaded.size(), false);
    std::deque<std::size_t> available;  // eligible DATA of the current key, oldest first

    std::size_t group_begin = 0;
    while (group_begin < loaded.size()) {
        std::size_t group_end = group_begin;
        bool has_data = false;
        bool has_op = false;
        while (group_end < loaded.size() && loaded[group_end].key == loaded[group_begin].key) {
            (loaded[group_end].is_data() ? has_data : has_op) = true;
            ++group_end;
        }
        if (has_data && has_op) {
            available.clear();
            for (std::size_t i = group_begin; i < group_end; ++i) {
                Element& e = loaded[i];
                if (e.is_data()) {
                    available.push_back(i);
                    continue;
                }
                if (available.empty()) continue;
                Element& match = loaded[available.front()];
                if (e.kind == ElementKind::Delete) {
                    out.results.push_back({e.ticket, Outcome::Deleted, e.key, match.payload, match.ticket, depth});
                    consumed[available.front()] = true;
                    available.pop_front();
                } else {
                    out.results.push_back({e.ticket, Outcome::Found, e.key, match.payload, match.ticket, depth});
                    if (on_search_match) on_search_match(match);
                }
                consumed[i] = true;
            }
        }
        group_begin = group_end;
    }

    out.survivors.reserve(loaded.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        if (!consumed[i]) out.survivors.push_back(loaded[i]);
    }
    return out;
}

void resolve_as_missing(std::vector<Element>& elements, std::uint32_t depth, std::vector<ResultEvent>& out) {
    std::vector<Element> ops;
    std::erase_if(elements, [&](const Element& e) {
        if (e.is_data()) return false;
        ops.push_back(e);
        return true;
    });
    std::sort(ops.begin(), ops.end(), [](const Element& a, const Element& b) { return a.ticket < b.ticket; });
    for (const Element& e : ops) {
        const Outcome outcome = e.kind == ElementKind::Delete ? Outcome::DeleteNotFound : Outcome::NotFound;
        out.push_back({e.ticket, outcome, e.key, 0, 0, depth});
    }
}

}  // namespace rbt

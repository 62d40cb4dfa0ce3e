#pragma once

#include <algorithm>
#include <vector>

#include "rbt/buffer_tree.hpp"

namespace rbt::test {

inline TreeConfig small_config(std::size_t block, std::size_t fanout, std::uint64_t seed = 1,
                               SelfAdjustMode mode = SelfAdjustMode::None) {
    TreeConfig c;
    c.block_capacity = block;
    c.fanout = fanout;
    c.rng_seed = seed;
    c.selfadjust_mode = mode;
    return c;
}

// Buffer contents of one node, in stored order.
inline std::vector<Element> buffer_of(const BufferTree& tree, NodeId id) {
    std::vector<Element> out;
    for (const Run& r : tree.node(id).runs) {
        for (BlockId b : r.blocks) {
            const auto& elems = tree.store().inspect(b).elements;
            out.insert(out.end(), elems.begin(), elems.end());
        }
    }
    return out;
}

inline std::vector<Key> sorted_data_keys(const BufferTree& tree) {
    std::vector<Key> keys;
    for (const auto& located : tree.scan()) {
        if (located.element.is_data()) keys.push_back(located.element.key);
    }
    for (const Element& e : tree.staging()) {
        if (e.is_data()) keys.push_back(e.key);
    }
    for (const Element& e : tree.min_cache().entries()) keys.push_back(e.key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

}  // namespace rbt::test

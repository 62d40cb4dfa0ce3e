#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "rbt/buffer_tree.hpp"
#include "test_util.hpp"

using namespace rbt;
using rbt::test::small_config;

namespace {

// Minimum DATA key outside the cache (tree buffers and staging).
std::optional<Key> external_min(const BufferTree& tree) {
    std::optional<Key> best;
    for (const auto& located : tree.scan()) {
        if (located.element.is_data() && (!best || located.element.key < *best)) best = located.element.key;
    }
    for (const Element& e : tree.staging()) {
        if (e.is_data() && (!best || e.key < *best)) best = e.key;
    }
    return best;
}

}  // namespace

TEST(DeleteMin, SmallExample) {
    BufferTree tree(small_config(4, 4));
    tree.insert(3);
    tree.insert(1);
    tree.insert(2);
    tree.flush();
    EXPECT_EQ(tree.delete_min().key, 1);
    EXPECT_EQ(tree.delete_min().key, 2);
    EXPECT_EQ(tree.delete_min().key, 3);
    EXPECT_EQ(tree.delete_min().outcome, Outcome::Empty);
}

TEST(DeleteMin, EmptyTreeSignals) {
    BufferTree tree(small_config(4, 4));
    const ResultEvent r = tree.delete_min();
    EXPECT_EQ(r.outcome, Outcome::Empty);
}

TEST(DeleteMin, CacheServesWithoutIo) {
    BufferTree tree(small_config(8, 8));
    for (int i = 0; i < 5000; ++i) tree.insert(i * 13 % 5003);
    tree.flush();
    std::size_t refills = 0;
    while (tree.size() > 0) {
        const bool refill = tree.min_cache().empty();
        ASSERT_EQ(tree.delete_min().outcome, Outcome::Min);
        if (!refill) continue;
        ++refills;
        const std::size_t cached = tree.min_cache().size();
        ASSERT_LT(cached, tree.config().cache_capacity());
        const IoStats before = tree.io_stats();
        for (std::size_t i = 0; i < cached; ++i) ASSERT_EQ(tree.delete_min().outcome, Outcome::Min);
        ASSERT_EQ(tree.io_stats(), before);
    }
    EXPECT_GT(refills, 5000u / 16);
}

TEST(DeleteMin, RefillTakesAtMostCacheCapacity) {
    BufferTree tree(small_config(4, 8));  // capacity 8
    for (int i = 19; i >= 0; --i) tree.insert(i);  // 5 blocks: the root stays a leaf
    EXPECT_EQ(tree.delete_min().key, 0);
    EXPECT_EQ(tree.min_cache().size(), 7u);
    EXPECT_EQ(tree.min_cache().max_key(), 7);
}

TEST(DeleteMin, SortsLargeInput) {
    BufferTree tree(small_config(4, 4, 5));
    std::mt19937_64 rng(5);
    std::vector<Key> keys(4096);
    for (Key& k : keys) k = static_cast<Key>(rng());
    for (Key k : keys) tree.insert(k);
    std::vector<Key> out;
    for (;;) {
        const ResultEvent r = tree.delete_min();
        if (r.outcome == Outcome::Empty) break;
        out.push_back(r.key);
    }
    std::sort(keys.begin(), keys.end());
    EXPECT_EQ(out, keys);
    const double n = 4096.0 / 4;
    EXPECT_LE(static_cast<double>(tree.io_stats().total()), 40.0 * n * std::log(n) / std::log(4.0));
}

TEST(DeleteMin, InsertBelowCacheMaxGoesToCache) {
    BufferTree tree(small_config(4, 8));
    for (int i = 10; i < 500; ++i) tree.insert(i);
    EXPECT_EQ(tree.delete_min().key, 10);
    const IoStats before = tree.io_stats();
    tree.insert(3);
    EXPECT_EQ(tree.io_stats(), before);
    EXPECT_EQ(tree.min_cache().entries().front().key, 3);
    EXPECT_EQ(tree.delete_min().key, 3);
}

TEST(DeleteMin, CacheOverflowEvictsLargestToStaging) {
    BufferTree tree(small_config(2, 4));  // cache capacity 2
    for (int i = 10; i < 14; ++i) tree.insert(i);
    EXPECT_EQ(tree.delete_min().key, 10);  // cache now {11}
    tree.insert(1);
    tree.insert(0);  // cache {0,1}; 11 evicted
    std::vector<Key> cache;
    for (const Element& e : tree.min_cache().entries()) cache.push_back(e.key);
    EXPECT_EQ(cache, (std::vector<Key>{0, 1}));
    EXPECT_EQ(tree.delete_min().key, 0);
    EXPECT_EQ(tree.delete_min().key, 1);
    EXPECT_EQ(tree.delete_min().key, 11);
}

TEST(DeleteMin, DeleteHitsCacheImmediately) {
    BufferTree tree(small_config(4, 8));
    for (int i = 0; i < 20; ++i) tree.insert(i);
    (void)tree.delete_min();
    ASSERT_NE(tree.min_cache().find(3), nullptr);
    const Ticket hit = tree.remove(3);
    const Ticket miss = tree.remove(15);
    const auto results = tree.poll_results();
    ASSERT_EQ(results.size(), 1u);
    EXPECT_EQ(results[0].ticket, hit);
    EXPECT_EQ(results[0].outcome, Outcome::Deleted);
    tree.flush();
    const auto later = tree.poll_results();
    ASSERT_EQ(later.size(), 1u);
    EXPECT_EQ(later[0].ticket, miss);
    EXPECT_EQ(later[0].outcome, Outcome::Deleted);
}

TEST(DeleteMin, PrefixPropertyUnderRandomInterleaving) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        BufferTree tree(small_config(2, 4, seed));
        std::mt19937_64 rng(seed);
        std::multiset<Key> reference;
        for (int i = 0; i < 1500; ++i) {
            const auto pick = rng() % 10;
            const Key k = static_cast<Key>(rng() % 100);
            if (pick < 5) {
                tree.insert(k);
                reference.insert(k);
            } else if (pick < 6) {
                tree.remove(k);
            } else {
                const ResultEvent r = tree.delete_min();
                (void)r;
            }
            if (!tree.min_cache().empty()) {
                const auto m = external_min(tree);
                if (m) ASSERT_LE(tree.min_cache().max_key(), *m) << "seed " << seed << " step " << i;
            }
        }
    }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rbt/buffer_tree.hpp"
#include "rbt/self_adjust.hpp"

using namespace rbt;

TEST(Rerandomize, KeepsTheLarger) {
    EXPECT_EQ(rerandomized_priority(10, 900), 900u);
    EXPECT_EQ(rerandomized_priority(900, 10), 900u);
}

TEST(Rerandomize, NeverDecreases) {
    std::mt19937_64 rng(7);
    Priority p = 1;
    for (int i = 0; i < 1000; ++i) {
        const Priority next = rerandomized_priority(p, rng());
        EXPECT_GE(next, p);
        p = next;
    }
}

TEST(Rerandomize, KMatchesGiveMaxOfKPlusOneDraws) {
    // P(max of k+1 uniforms <= x) = x^(k+1)
    std::mt19937_64 rng(11);
    const int k = 3;
    const int trials = 20000;
    const double probes[] = {0.5, 0.7, 0.9};
    int below[3] = {0, 0, 0};
    for (int t = 0; t < trials; ++t) {
        Priority p = rng();
        for (int i = 0; i < k; ++i) p = rerandomized_priority(p, rng());
        const double x = static_cast<double>(p) / 18446744073709551616.0;
        for (int j = 0; j < 3; ++j) below[j] += x <= probes[j] ? 1 : 0;
    }
    for (int j = 0; j < 3; ++j) {
        const double expected = std::pow(probes[j], k + 1);
        EXPECT_NEAR(static_cast<double>(below[j]) / trials, expected, 0.015) << probes[j];
    }
}

TEST(Counter, IncrementsAndSaturates) {
    const Priority bound = counter_reset_bound(4);
    EXPECT_EQ(bound, 15u);
    EXPECT_EQ(incremented_counter(1, bound), 2u);
    EXPECT_EQ(incremented_counter(15, bound), 15u);
}

TEST(Counter, AgingHalvesWithFloorOne) {
    EXPECT_EQ(aged_counter(8, 1), 4u);
    EXPECT_EQ(aged_counter(3, 1), 1u);
    EXPECT_EQ(aged_counter(1, 1), 1u);
    EXPECT_EQ(aged_counter(8, 2), 2u);
    EXPECT_EQ(aged_counter(8, 0), 8u);
    EXPECT_EQ(aged_counter(8, 70), 1u);
}

TEST(Counter, AgingIsMonotone) {
    for (Priority a = 1; a < 64; ++a) {
        for (Priority b = a + 2; b < 66; ++b) EXPECT_LE(aged_counter(a, 1), aged_counter(b, 1));
    }
}

TEST(Mode, ParsesAndPrints) {
    EXPECT_EQ(parse_self_adjust_mode("rerandomize"), SelfAdjustMode::Rerandomize);
    EXPECT_EQ(parse_self_adjust_mode("counter"), SelfAdjustMode::Counter);
    EXPECT_EQ(parse_self_adjust_mode("none"), SelfAdjustMode::None);
    EXPECT_FALSE(parse_self_adjust_mode("bogus"));
    EXPECT_EQ(to_string(SelfAdjustMode::Counter), "counter");
}

TEST(Counter, InsertStartsAtOneAndSearchIncrements) {
    TreeConfig config;
    config.block_capacity = 4;
    config.fanout = 4;
    config.selfadjust_mode = SelfAdjustMode::Counter;
    BufferTree tree(config);
    tree.insert(5);
    tree.flush();
    ASSERT_EQ(tree.scan().size(), 1u);
    EXPECT_EQ(tree.scan()[0].element.priority, 1u);
    tree.search(5);
    tree.search(5);
    tree.flush();
    EXPECT_EQ(tree.scan()[0].element.priority, 3u);
}

TEST(Counter, GlobalResetAgesCountersLazily) {
    TreeConfig config;
    config.block_capacity = 4;
    config.fanout = 4;
    config.selfadjust_mode = SelfAdjustMode::Counter;
    config.counter_bits = 3;  // bound 7
    BufferTree tree(config);
    tree.insert(1);
    tree.insert(2);
    for (int i = 0; i < 3; ++i) tree.search(2);
    tree.flush();
    EXPECT_EQ(tree.counter_epoch(), 0u);
    for (int i = 0; i < 6; ++i) tree.search(1);
    tree.flush();
    EXPECT_GE(tree.counter_epoch(), 1u);
    for (const auto& located : tree.scan()) {
        EXPECT_LT(located.element.priority, counter_reset_bound(3));
    }
    EXPECT_TRUE(tree.check_invariants().empty());
}

TEST(Counter, FrequentlyMatchedElementSitsHigher) {
    // One key searched 5 times against many keys searched once: the hot
    // key must on average sit strictly shallower after a flush.
    double hot_depth = 0;
    double cold_depth = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        TreeConfig config;
        config.block_capacity = 4;
        config.fanout = 4;
        config.rng_seed = seed;
        config.selfadjust_mode = SelfAdjustMode::Counter;
        BufferTree tree(config);
        std::mt19937_64 rng(seed);
        std::vector<Key> keys(2000);
        std::iota(keys.begin(), keys.end(), 0);
        std::shuffle(keys.begin(), keys.end(), rng);
        for (Key k : keys) tree.insert(k);
        tree.flush();
        const Key hot = keys[0];
        const Key cold = keys[1];
        for (int i = 0; i < 5; ++i) tree.search(hot);
        for (std::size_t i = 1; i <= 200; ++i) tree.search(keys[i]);
        tree.flush();
        for (const auto& located : tree.scan()) {
            if (located.element.key == hot) hot_depth += located.depth;
            if (located.element.key == cold) cold_depth += located.depth;
        }
    }
    EXPECT_LT(hot_depth / 30, cold_depth / 30);
}

#include <gtest/gtest.h>

#include "rbt/buffer_tree.hpp"
#include "test_util.hpp"

using namespace rbt;
using rbt::test::small_config;

TEST(Invariants, FlushedRandomTreeIsClean) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        BufferTree tree(small_config(4, 8, seed));
        std::mt19937_64 rng(seed);
        for (int i = 0; i < 5000; ++i) tree.insert(static_cast<Key>(rng()));
        tree.flush();
        EXPECT_TRUE(tree.check_invariants().empty()) << seed;
    }
}

TEST(Invariants, HandBuiltHeapViolation) {
    BufferTree tree(small_config(4, 8));
    const auto children = tree.attach_children(tree.root(), {10});
    tree.append_to_buffer(tree.root(), {tree.make_element(ElementKind::Data, 3, 100),
                                        tree.make_element(ElementKind::Data, 12, 90)});
    tree.append_to_buffer(children[0], {tree.make_element(ElementKind::Data, 4, 1000)});
    tree.append_to_buffer(children[1], {tree.make_element(ElementKind::Data, 15, 5)});
    const auto v = tree.check_invariants();
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, ViolationKind::HeapOrder);
    EXPECT_EQ(v[0].path, (std::vector<std::size_t>{0}));
}

TEST(Invariants, HandBuiltKeyViolation) {
    BufferTree tree(small_config(4, 8));
    const auto children = tree.attach_children(tree.root(), {10, 20});
    tree.append_to_buffer(children[1], {tree.make_element(ElementKind::Data, 20, 5)});  // must be < 20
    const auto v = tree.check_invariants();
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, ViolationKind::KeyOrder);
    EXPECT_EQ(v[0].keys, (std::vector<Key>{20}));
    EXPECT_EQ(describe(v[0]), "kind=keys path=/1 keys=[20] key outside the node's separator gap");
}

TEST(Invariants, PendingOperationReported) {
    BufferTree tree(small_config(4, 8));
    tree.append_to_buffer(tree.root(), {tree.make_element(ElementKind::Search, 1, 0)});
    const auto v = tree.check_invariants();
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, ViolationKind::PendingOp);
}

TEST(Invariants, OccupancyReportedForThinInternalNode) {
    BufferTree tree(small_config(4, 8));
    const auto children = tree.attach_children(tree.root(), {10});
    tree.attach_children(children[0], {5});
    const auto v = tree.check_invariants();
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, ViolationKind::Occupancy);
}

TEST(Invariants, InjectedFaultsGiveExactlyOneViolation) {
    for (FaultKind kind : {FaultKind::Heap, FaultKind::Keys}) {
        BufferTree tree(small_config(4, 8, 3));
        for (int i = 0; i < 3000; ++i) tree.insert(i * 7 % 3001);
        tree.flush();
        ASSERT_TRUE(tree.check_invariants().empty());
        ASSERT_TRUE(tree.inject_fault(kind));
        const auto v = tree.check_invariants();
        ASSERT_EQ(v.size(), 1u);
        EXPECT_EQ(v[0].kind, kind == FaultKind::Heap ? ViolationKind::HeapOrder : ViolationKind::KeyOrder);
        EXPECT_FALSE(v[0].path.empty());
    }
}

TEST(Invariants, InjectionNeedsStructure) {
    BufferTree tree(small_config(4, 8));
    tree.insert(1);
    tree.flush();
    EXPECT_FALSE(tree.inject_fault(FaultKind::Heap));
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rbt/block_store.hpp"
#include "rbt/element.hpp"
#include "rbt/min_cache.hpp"
#include "rbt/result.hpp"
#include "rbt/self_adjust.hpp"

namespace rbt {

struct TreeConfig {
    std::size_t block_capacity = 64;  // B
    std::size_t fanout = 16;          // f: the memory size in blocks, or a reduced fan-out
    std::uint64_t rng_seed = 1;
    SelfAdjustMode selfadjust_mode = SelfAdjustMode::None;
    unsigned counter_bits = 16;

    /// Throws std::invalid_argument unless B >= 2, f >= 4 and, in counter
    /// mode, 2 <= counter_bits <= 63.
    void validate() const;

    // Occupancy thresholds in blocks: floor(f/4), ceil(f/2), floor(3f/4).
    [[nodiscard]] std::size_t quarter() const noexcept { return fanout / 4; }
    [[nodiscard]] std::size_t half() const noexcept { return (fanout + 1) / 2; }
    [[nodiscard]] std::size_t three_quarters() const noexcept { return 3 * fanout / 4; }
    [[nodiscard]] std::size_t cache_capacity() const noexcept { return quarter() * block_capacity; }
};

enum class EmptyMode : std::uint8_t { KeepHalf, Full };

struct NodeId {
    std::uint32_t value = 0;
    friend bool operator==(NodeId, NodeId) = default;
};

/// A sorted run of blocks inside a node buffer: the concatenated elements
/// are in descending priority order. A buffer is a list of runs; pushes from
/// the parent append a run, and every load merges them into one.
struct Run {
    std::vector<BlockId> blocks;
    std::size_t size = 0;
    std::uint32_t epoch = 0;  // oldest counter epoch among the run's elements
};

struct Node {
    std::vector<Key> separators;
    std::vector<NodeId> children;
    std::vector<Run> runs;
    std::size_t elements = 0;
    std::size_t ops = 0;
    std::uint32_t depth = 0;
    bool live = false;

    [[nodiscard]] bool is_leaf() const noexcept { return children.empty(); }
    [[nodiscard]] std::size_t buffer_blocks() const noexcept {
        std::size_t n = 0;
        for (const Run& r : runs) n += r.blocks.size();
        return n;
    }
};

enum class PrimitiveKind : std::uint8_t { EmptyBuffer, FillBuffer };

/// Measurement of one EMPTYBUFFER / FILLBUFFER invocation, reported to an
/// observer after the invocation returns. `own_io` excludes I/Os performed by
/// nested primitive invocations (recursive empties and step-4 fills).
struct PrimitiveRecord {
    PrimitiveKind kind = PrimitiveKind::EmptyBuffer;
    EmptyMode mode = EmptyMode::KeepHalf;
    NodeId node;
    std::uint32_t depth = 0;
    bool was_leaf = false;
    bool pushed = false;  // elements were distributed to children
    std::size_t blocks_before = 0;
    std::size_t blocks_after = 0;  // buffer blocks when the invocation's own work finished
    std::uint64_t own_io = 0;
    std::uint64_t total_io = 0;
};

enum class ViolationKind : std::uint8_t { HeapOrder, KeyOrder, Occupancy, BufferOrder, PendingOp, Structure };

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
    ViolationKind kind;
    std::vector<std::size_t> path;  // child indices from the root
    std::vector<Key> keys;          // offending keys
    std::string detail;
};

std::string describe(const Violation& v);

enum class FaultKind : std::uint8_t { Heap, Keys };

/// The random buffer tree: an f-ary search tree over keys whose node buffers
/// also form a max-heap over random priorities. Operations are batched: they
/// are collected in a main-memory staging block, enter the root buffer a
/// block at a time and are answered lazily as buffers are emptied.
///
/// Single-threaded; movable but not copyable.
class BufferTree {
public:
    using Observer = std::function<void(const PrimitiveRecord&)>;

    explicit BufferTree(TreeConfig config);
    BufferTree(const BufferTree&) = delete;
    BufferTree& operator=(const BufferTree&) = delete;
    BufferTree(BufferTree&&) noexcept = default;
    BufferTree& operator=(BufferTree&&) noexcept = default;

    // --- dictionary operations -------------------------------------------

    Ticket insert(Key key, Payload payload = 0);
    Ticket remove(Key key);
    Ticket search(Key key);

    /// Pushes the staging block to the root, resolves every pending
    /// operation and restores the quiescent invariants (heap order over DATA,
    /// key order, occupancy, sorted buffers).
    void flush();

    /// Drains results emitted since the previous poll, in emission order.
    std::vector<ResultEvent> poll_results();

    // --- priority queue ----------------------------------------------------

    /// Removes and returns the element with the smallest key (Outcome::Min),
    /// or Outcome::Empty when nothing is stored.
    ResultEvent delete_min();

    // --- primitives (public for testing and instrumentation) ---------------

    void empty_buffer(NodeId node, EmptyMode mode);
    void fill_buffer(NodeId node);
    [[nodiscard]] std::vector<Violation> check_invariants() const;

    // --- inspection ----------------------------------------------------------

    [[nodiscard]] const TreeConfig& config() const noexcept { return config_; }
    [[nodiscard]] NodeId root() const noexcept { return root_; }
    [[nodiscard]] const Node& node(NodeId id) const { return nodes_.at(id.value); }
    [[nodiscard]] IoStats io_stats() const noexcept { return store_.stats(); }
    void reset_io_stats() noexcept { store_.reset_stats(); }
    [[nodiscard]] const BlockStore& store() const noexcept { return store_; }
    [[nodiscard]] std::size_t live_blocks() const noexcept { return store_.live_blocks(); }

    /// Number of node levels (a lone root leaf has height 1).
    [[nodiscard]] std::size_t height() const;
    [[nodiscard]] std::size_t internal_nodes() const;
    [[nodiscard]] std::size_t node_count() const;

    /// DATA elements stored anywhere: buffers, staging and the min-cache.
    [[nodiscard]] std::size_t size() const noexcept;
    /// Operation elements not yet answered.
    [[nodiscard]] std::size_t pending_ops() const noexcept;

    [[nodiscard]] const MinCache& min_cache() const noexcept { return cache_; }
    [[nodiscard]] std::span<const Element> staging() const noexcept { return staging_; }

    /// Every element held in node buffers, with its node depth. Reads through
    /// BlockStore::inspect, so no I/O is charged.
    struct Located {
        Element element;
        std::uint32_t depth;
    };
    [[nodiscard]] std::vector<Located> scan() const;

    void set_observer(Observer observer) { observer_ = std::move(observer); }

    /// Current counter-reset epoch (counter mode).
    [[nodiscard]] std::uint32_t counter_epoch() const noexcept { return epoch_; }

    // --- manual construction (tests) ----------------------------------------

    /// Builds an element with a fresh ticket without inserting it.
    Element make_element(ElementKind kind, Key key, Priority priority, Payload payload = 0);
    /// Appends `elements` to a node buffer as one sorted run.
    void append_to_buffer(NodeId node, std::vector<Element> elements);
    /// Turns a leaf into an internal node with separators.size()+1 empty
    /// leaf children. Returns the children.
    std::vector<NodeId> attach_children(NodeId leaf, std::vector<Key> separators);

    /// Corrupts the structure for negative testing of check_invariants.
    /// Returns false if the tree has no suitable spot.
    bool inject_fault(FaultKind kind);

private:
    struct PrimitiveScope;
    friend struct PrimitiveScope;

    Node& mut(NodeId id) { return nodes_[id.value]; }
    NodeId new_node(std::uint32_t depth);
    void release_node(NodeId id);

    Ticket next_ticket() noexcept { return next_ticket_++; }
    Priority fresh_priority();
    void stage(const Element& e);
    void push_staging();

    std::vector<Element> load_buffer(NodeId id);
    void write_run(NodeId id, std::span<const Element> elements);
    void normalize(std::vector<Element>& elements) const;
    void maybe_reset_counters(NodeId id, std::vector<Element>& elements);
    void resolve(NodeId id, std::vector<Element>& elements);
    void push_to_children(NodeId id, std::span<const Element> elements);
    bool split_leaf(NodeId id, std::span<const Element> overflow);
    void empty_overflowing_children(NodeId id);
    void settle(NodeId id);
    [[nodiscard]] bool needs_settle(NodeId id) const;
    void fill_with(NodeId id, std::vector<Element> in_memory);
    std::size_t pull_from_children(NodeId id, std::vector<Element>& data, std::vector<Element>& selected,
                                   std::size_t target, bool& stalled);
    void prune_empty_children(NodeId id);
    void rebuild(NodeId id);
    void refill_cache();
    bool extract_leftmost(const std::vector<NodeId>& path);
    void emit(std::vector<ResultEvent>& results);

    [[nodiscard]] std::size_t blocks_for(std::size_t elements) const noexcept;

    TreeConfig config_;
    BlockStore store_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> free_nodes_;
    NodeId root_;
    std::vector<Element> staging_;
    MinCache cache_;
    std::vector<ResultEvent> results_;
    std::mt19937_64 rng_;
    Ticket next_ticket_ = 1;
    std::size_t tree_data_ = 0;  // DATA in node buffers
    std::size_t tree_ops_ = 0;   // operation elements in node buffers
    std::uint32_t epoch_ = 0;
    Observer observer_;
    std::vector<std::uint64_t> nested_io_;  // per active primitive: I/O charged to nested invocations
};

}  // namespace rbt

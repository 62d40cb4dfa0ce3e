#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rbt/element.hpp"

namespace rbt {

/// Opaque handle to a block in a BlockStore.
struct BlockId {
    std::uint64_t value = 0;
    friend bool operator==(BlockId, BlockId) = default;
    friend auto operator<=>(BlockId, BlockId) = default;
};

struct Block {
    std::vector<Element> elements;

    [[nodiscard]] std::size_t count() const noexcept { return elements.size(); }
    friend bool operator==(const Block&, const Block&) = default;
};

struct IoStats {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;

    [[nodiscard]] std::uint64_t total() const noexcept { return reads + writes; }
    friend bool operator==(const IoStats&, const IoStats&) = default;
};

struct StoreConfig {
    std::size_t block_capacity = 64;
    // When false, an oversize block is accepted and charged one transfer per
    // B-element slice it occupies.
    bool fail_on_oversize = true;
};

class StoreError : public std::runtime_error {
public:
    enum class Code { InvalidHandle, Oversize, InvalidConfig };

    StoreError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] Code code() const noexcept { return code_; }

private:
    Code code_;
};

/// Simulated external memory. Every read() and write() is one I/O in the
/// Aggarwal-Vitter sense, independent of how many slots the block uses.
/// alloc() and free() are metadata and cost nothing.
///
/// Not thread-safe; a store has a single writer.
class BlockStore {
public:
    explicit BlockStore(StoreConfig config = {});

    [[nodiscard]] BlockId alloc();
    void write(BlockId id, Block block);
    [[nodiscard]] Block read(BlockId id);
    void free(BlockId id);

    /// Diagnostic access outside the cost model (no I/O is charged). Used by
    /// invariant checks and fault injection.
    [[nodiscard]] const Block& inspect(BlockId id) const;

    [[nodiscard]] IoStats stats() const noexcept { return stats_; }
    void reset_stats() noexcept { stats_ = {}; }

    [[nodiscard]] std::size_t block_capacity() const noexcept { return config_.block_capacity; }
    [[nodiscard]] std::size_t live_blocks() const noexcept { return slots_.size(); }

private:
    struct Slot {
        bool written = false;
        Block block;
    };

    Slot& live_slot(BlockId id, const char* op);
    [[nodiscard]] std::uint64_t transfers_for(std::size_t count) const noexcept;

    StoreConfig config_;
    std::uint64_t next_id_ = 1;
    std::unordered_map<std::uint64_t, Slot> slots_;
    IoStats stats_;
};

}  // namespace rbt

#include "rbt/block_store.hpp"

#include <string>

namespace rbt {

BlockStore::BlockStore(StoreConfig config) : config_(config) {
    if (config_.block_capacity < 2) {
        throw StoreError(StoreError::Code::InvalidConfig, "block capacity must be at least 2");
    }
}

BlockId BlockStore::alloc() {
    const BlockId id{next_id_++};
    slots_.emplace(id.value, Slot{});
    return id;
}

BlockStore::Slot& BlockStore::live_slot(BlockId id, const char* op) {
    auto it = slots_.find(id.value);
    if (it == slots_.end()) {
        throw StoreError(StoreError::Code::InvalidHandle,
                         std::string(op) + ": block " + std::to_string(id.value) + " is not live");
    }
    return it->second;
}

std::uint64_t BlockStore::transfers_for(std::size_t count) const noexcept {
    if (count <= config_.block_capacity) return 1;
    return (count + config_.block_capacity - 1) / config_.block_capacity;
}

void BlockStore::write(BlockId id, Block block) {
    Slot& slot = live_slot(id, "write");
    if (block.count() > config_.block_capacity && config_.fail_on_oversize) {
        throw StoreError(StoreError::Code::Oversize,
                         "write: block holds " + std::to_string(block.count()) + " elements, capacity is " +
                             std::to_string(config_.block_capacity));
    }
    stats_.writes += transfers_for(block.count());
    slot.block = std::move(block);
    slot.written = true;
}

Block BlockStore::read(BlockId id) {
    Slot& slot = live_slot(id, "read");
    if (!slot.written) {
        throw StoreError(StoreError::Code::InvalidHandle,
                         "read: block " + std::to_string(id.value) + " was never written");
    }
    stats_.reads += transfers_for(slot.block.count());
    return slot.block;
}

void BlockStore::free(BlockId id) {
    if (slots_.erase(id.value) == 0) {
        throw StoreError(StoreError::Code::InvalidHandle,
                         "free: block " + std::to_string(id.value) + " is not live");
    }
}

const Block& BlockStore::inspect(BlockId id) const {
    auto it = slots_.find(id.value);
    if (it == slots_.end() || !it->second.written) {
        throw StoreError(StoreError::Code::InvalidHandle,
                         "inspect: block " + std::to_string(id.value) + " is not readable");
    }
    return it->second.block;
}

}  // namespace rbt

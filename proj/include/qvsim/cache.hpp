#pragma once

#include <cstdint>
#include <list>
#include <unordered_map>

#include "qvsim/metrics.hpp"
#include "qvsim/store.hpp"

namespace qvsim {

struct CacheConfig {
    std::uint64_t capacity_bytes = 0; // the in-memory budget M
    std::uint64_t block_amps = 0;     // must match the store
};

class CacheWindow;

/// RAII pin on a resident block. A pinned block cannot be evicted; the pin is
/// dropped on destruction. At most one pair unit (two leases) is held at a
/// time by the kernels.
class BlockLease {
  public:
    BlockLease(BlockLease &&other) noexcept;
    BlockLease &operator=(BlockLease &&other) noexcept;
    BlockLease(const BlockLease &) = delete;
    BlockLease &operator=(const BlockLease &) = delete;
    ~BlockLease();

    BlockBuffer &buffer() noexcept { return *buffer_; }
    const BlockBuffer &buffer() const noexcept { return *buffer_; }
    std::uint64_t block_id() const noexcept { return buffer_->block_id; }
    void mark_dirty() noexcept { buffer_->dirty = true; }

  private:
    friend class CacheWindow;
    BlockLease(CacheWindow *cache, BlockBuffer *buffer)
        : cache_(cache), buffer_(buffer) {}

    CacheWindow *cache_ = nullptr;
    BlockBuffer *buffer_ = nullptr;
};

/// Bounded sliding window over store blocks: on-demand load, in-cache
/// computation, write-back of dirty blocks on eviction or flush. Eviction is
/// oldest-inserted-first, skipping pinned blocks. Owned by a single worker;
/// never shared across threads.
class CacheWindow {
  public:
    /// Throws CapacityError unless the budget holds at least one cross-block
    /// pair unit (two blocks).
    CacheWindow(BlockStore &store, CacheConfig config, Metrics &metrics);

    CacheWindow(const CacheWindow &) = delete;
    CacheWindow &operator=(const CacheWindow &) = delete;
    ~CacheWindow();

    /// Pinning handle for the block, loading it (and evicting the oldest
    /// unpinned resident, with write-back if dirty) as needed.
    BlockLease acquire(std::uint64_t block_id);

    void mark_dirty(std::uint64_t block_id);

    /// Write back every dirty resident block and drop all residents.
    /// Idempotent.
    void flush();

    // Capacity, in the three views used by sizing arithmetic.
    std::uint64_t capacity_bytes() const noexcept {
        return config_.capacity_bytes;
    }
    std::uint64_t capacity_states() const noexcept {
        return config_.capacity_bytes / kAmpBytes;
    }
    std::uint64_t capacity_blocks() const noexcept { return max_resident_; }

    std::uint64_t resident_blocks() const noexcept { return entries_.size(); }
    std::uint64_t resident_bytes() const noexcept {
        return entries_.size() * block_bytes_;
    }
    std::uint64_t hits() const noexcept { return hits_; }
    std::uint64_t misses() const noexcept { return misses_; }
    std::uint64_t evictions() const noexcept { return evictions_; }

  private:
    friend class BlockLease;

    struct Entry {
        BlockBuffer buffer;
        std::uint32_t pins = 0;
    };

    void unpin(BlockBuffer *buffer);
    void evict_one();
    void note_allocated();

    BlockStore &store_;
    CacheConfig config_;
    Metrics &metrics_;
    std::uint64_t block_bytes_ = 0;
    std::uint64_t max_resident_ = 0;

    std::list<std::uint64_t> order_; // insertion order, oldest first
    std::unordered_map<std::uint64_t, Entry> entries_;
    std::vector<BlockBuffer> free_pool_; // recycled buffers, capped so that
                                         // resident + pooled <= capacity
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
    std::uint64_t evictions_ = 0;
};

/// Amplitudes that fit in a cache region of the given byte size.
std::uint64_t cache_capacity_states(std::uint64_t capacity_bytes);

/// Blocks that fit in a cache region of the given byte size.
std::uint64_t cache_capacity_blocks(std::uint64_t capacity_bytes,
                                    std::uint64_t block_amps);

} // namespace qvsim

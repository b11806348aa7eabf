#include "qvsim/cache.hpp"

#include <bit>

#include "qvsim/error.hpp"

namespace qvsim {

std::uint64_t cache_capacity_states(std::uint64_t capacity_bytes) {
    if (capacity_bytes < kAmpBytes) {
        throw ValidationError("cache capacity below one amplitude (16 bytes)");
    }
    return capacity_bytes / kAmpBytes;
}

std::uint64_t cache_capacity_blocks(std::uint64_t capacity_bytes,
                                    std::uint64_t block_amps) {
    return cache_capacity_states(capacity_bytes) / block_amps;
}

BlockLease::BlockLease(BlockLease &&other) noexcept
    : cache_(other.cache_), buffer_(other.buffer_) {
    other.cache_ = nullptr;
    other.buffer_ = nullptr;
}

BlockLease &BlockLease::operator=(BlockLease &&other) noexcept {
    if (this != &other) {
        if (cache_) {
            cache_->unpin(buffer_);
        }
        cache_ = other.cache_;
        buffer_ = other.buffer_;
        other.cache_ = nullptr;
        other.buffer_ = nullptr;
    }
    return *this;
}

BlockLease::~BlockLease() {
    if (cache_) {
        cache_->unpin(buffer_);
    }
}

CacheWindow::CacheWindow(BlockStore &store, CacheConfig config,
                         Metrics &metrics)
    : store_(store), config_(config), metrics_(metrics) {
    if (config_.block_amps != store.block_amps()) {
        throw ValidationError("cache block size does not match the store");
    }
    block_bytes_ = config_.block_amps * kAmpBytes;
    if (config_.capacity_bytes < 2 * block_bytes_) {
        throw CapacityError(
            "cache capacity " + std::to_string(config_.capacity_bytes) +
            " bytes cannot hold one pair unit (two blocks of " +
            std::to_string(block_bytes_) + " bytes)");
    }
    max_resident_ = config_.capacity_bytes / block_bytes_;
}

CacheWindow::~CacheWindow() = default;

void CacheWindow::note_allocated() {
    const std::uint64_t allocated =
        (entries_.size() + free_pool_.size()) * block_bytes_;
    if (allocated > metrics_.peak_cache_bytes) {
        metrics_.peak_cache_bytes = allocated;
    }
}

void CacheWindow::evict_one() {
    for (auto it = order_.begin(); it != order_.end(); ++it) {
        Entry &entry = entries_.at(*it);
        if (entry.pins != 0) {
            continue;
        }
        if (entry.buffer.dirty) {
            store_.write_block(entry.buffer, metrics_);
        }
        entry.buffer.dirty = false;
        free_pool_.push_back(std::move(entry.buffer));
        entries_.erase(*it);
        order_.erase(it);
        evictions_ += 1;
        return;
    }
    throw CapacityError("all resident blocks are pinned; cache of " +
                        std::to_string(max_resident_) +
                        " block(s) cannot hold the working set");
}

BlockLease CacheWindow::acquire(std::uint64_t block_id) {
    auto it = entries_.find(block_id);
    if (it != entries_.end()) {
        hits_ += 1;
        metrics_.cache_hits += 1;
        it->second.pins += 1;
        return BlockLease(this, &it->second.buffer);
    }

    if (entries_.size() >= max_resident_) {
        evict_one();
    }
    BlockBuffer buf;
    if (!free_pool_.empty()) {
        buf = std::move(free_pool_.back());
        free_pool_.pop_back();
    }
    store_.read_block_into(block_id, buf, metrics_);

    Entry entry;
    entry.buffer = std::move(buf);
    entry.pins = 1;
    auto [pos, inserted] = entries_.emplace(block_id, std::move(entry));
    order_.push_back(block_id);

    misses_ += 1;
    metrics_.cache_misses += 1;
    note_allocated();
    return BlockLease(this, &pos->second.buffer);
}

void CacheWindow::mark_dirty(std::uint64_t block_id) {
    auto it = entries_.find(block_id);
    if (it == entries_.end()) {
        throw ValidationError("block " + std::to_string(block_id) +
                              " is not resident");
    }
    it->second.buffer.dirty = true;
}

void CacheWindow::unpin(BlockBuffer *buffer) {
    auto it = entries_.find(buffer->block_id);
    if (it != entries_.end() && it->second.pins > 0) {
        it->second.pins -= 1;
    }
}

void CacheWindow::flush() {
    for (auto &[id, entry] : entries_) {
        if (entry.pins != 0) {
            throw ValidationError("flush with block " + std::to_string(id) +
                                  " still pinned");
        }
        if (entry.buffer.dirty) {
            store_.write_block(entry.buffer, metrics_);
            entry.buffer.dirty = false;
        }
        free_pool_.push_back(std::move(entry.buffer));
    }
    entries_.clear();
    order_.clear();
}

} // namespace qvsim

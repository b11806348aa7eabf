#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <vector>

#include "qvsim/cache.hpp"
#include "qvsim/error.hpp"
#include "qvsim/store.hpp"
#include "test_util.hpp"

using namespace qvsim;
using qvsim_test::ScratchDir;

namespace {

/// Store of `blocks` blocks of `block_amps` amps, block b filled with b+1.
BlockStore make_filled_store(const ScratchDir &dir, const char *name,
                             std::uint32_t n_qubits, std::uint64_t block_amps) {
    BlockStore store =
        BlockStore::create(dir.file(name), n_qubits, block_amps, true);
    Metrics m;
    BlockBuffer buf;
    buf.amps.resize(block_amps);
    for (std::uint64_t b = 0; b < store.n_blocks(); ++b) {
        buf.block_id = b;
        for (amp_t &a : buf.amps) {
            a = amp_t{static_cast<double>(b + 1), 0};
        }
        store.write_block(buf, m);
    }
    return store;
}

} // namespace

TEST_CASE("capacity below one pair unit is refused at construction") {
    ScratchDir dir("cache-cap");
    BlockStore store = BlockStore::create(dir.file("s.qvs"), 6, 16);
    Metrics m;
    const std::uint64_t block_bytes = 16 * kAmpBytes;
    CHECK_THROWS_AS(CacheWindow(store, {block_bytes, 16}, m), CapacityError);
    CHECK_THROWS_AS(CacheWindow(store, {2 * block_bytes - 1, 16}, m),
                    CapacityError);
    CHECK_NOTHROW(CacheWindow(store, {2 * block_bytes, 16}, m));
    CHECK_THROWS_AS(CacheWindow(store, {2 * block_bytes, 8}, m),
                    ValidationError); // block size mismatch
}

TEST_CASE("capacity views agree: bytes, states, blocks") {
    ScratchDir dir("cache-views");
    BlockStore store = BlockStore::create(dir.file("s.qvs"), 6, 16);
    Metrics m;
    CacheWindow cache(store, {1000, 16}, m);
    CHECK(cache.capacity_bytes() == 1000);
    CHECK(cache.capacity_states() == 62); // floor(1000 / 16)
    CHECK(cache.capacity_blocks() == 3);  // floor(62 / 16)

    CHECK(cache_capacity_states(1000) == 62);
    CHECK(cache_capacity_blocks(1000, 16) == 3);
    CHECK_THROWS_AS(cache_capacity_states(8), ValidationError);
}

TEST_CASE("repeat access hits; distinct access misses") {
    ScratchDir dir("cache-hits");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {4 * 16 * kAmpBytes, 16}, m);

    { BlockLease l = cache.acquire(2); }
    CHECK(cache.misses() == 1);
    CHECK(cache.hits() == 0);
    { BlockLease l = cache.acquire(2); }
    CHECK(cache.misses() == 1);
    CHECK(cache.hits() == 1);
    { BlockLease l = cache.acquire(3); }
    CHECK(cache.misses() == 2);
    CHECK(m.cache_hits == 1);
    CHECK(m.cache_misses == 2);
    CHECK(m.blocks_read == 2); // only misses touch the store
}

TEST_CASE("leases expose the block's contents") {
    ScratchDir dir("cache-contents");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {2 * 16 * kAmpBytes, 16}, m);
    BlockLease lease = cache.acquire(3);
    CHECK(lease.block_id() == 3);
    CHECK(lease.buffer().amps[0] == amp_t{4, 0});
    CHECK(lease.buffer().amps[15] == amp_t{4, 0});
}

TEST_CASE("eviction is oldest-inserted-first, not least-recently-used") {
    ScratchDir dir("cache-fifo");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {2 * 16 * kAmpBytes, 16}, m);

    { BlockLease l = cache.acquire(0); }
    { BlockLease l = cache.acquire(1); }
    // Touch block 0 again; under LRU this would protect it. Insertion order
    // eviction drops it anyway.
    { BlockLease l = cache.acquire(0); }
    CHECK(cache.hits() == 1);
    { BlockLease l = cache.acquire(2); } // evicts 0, the oldest insert
    CHECK(cache.evictions() == 1);
    { BlockLease l = cache.acquire(1); } // still resident
    CHECK(cache.hits() == 2);
    { BlockLease l = cache.acquire(0); } // was evicted: a fresh miss
    CHECK(cache.misses() == 4);
}

TEST_CASE("dirty blocks are written back on eviction") {
    ScratchDir dir("cache-writeback");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {2 * 16 * kAmpBytes, 16}, m);

    {
        BlockLease lease = cache.acquire(0);
        lease.buffer().amps[7] = amp_t{-42, 0};
        lease.mark_dirty();
    }
    CHECK(m.blocks_written == 0); // still resident, nothing flushed yet
    { BlockLease l = cache.acquire(1); }
    { BlockLease l = cache.acquire(2); } // evicts dirty block 0
    CHECK(m.blocks_written == 1);

    Metrics probe;
    CHECK(store.read_amplitude(7, probe) == amp_t{-42, 0});
}

TEST_CASE("clean evictions do not touch the store") {
    ScratchDir dir("cache-clean");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {2 * 16 * kAmpBytes, 16}, m);
    { BlockLease l = cache.acquire(0); }
    { BlockLease l = cache.acquire(1); }
    { BlockLease l = cache.acquire(2); }
    { BlockLease l = cache.acquire(3); }
    CHECK(cache.evictions() == 2);
    CHECK(m.blocks_written == 0);
}

TEST_CASE("flush writes exactly the dirty residents and empties the window") {
    ScratchDir dir("cache-flush");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {4 * 16 * kAmpBytes, 16}, m);

    {
        BlockLease a = cache.acquire(0);
        a.buffer().amps[0] = amp_t{9, 9};
        a.mark_dirty();
    }
    { BlockLease b = cache.acquire(1); } // clean
    {
        BlockLease c = cache.acquire(2);
        c.buffer().amps[1] = amp_t{8, 8};
        c.mark_dirty();
    }
    CHECK(cache.resident_blocks() == 3);

    cache.flush();
    CHECK(m.blocks_written == 2);
    CHECK(cache.resident_blocks() == 0);
    CHECK(cache.resident_bytes() == 0);

    // Idempotent: a second flush moves nothing.
    cache.flush();
    CHECK(m.blocks_written == 2);

    Metrics probe;
    CHECK(store.read_amplitude(0, probe) == amp_t{9, 9});
    CHECK(store.read_amplitude(2 * 16 + 1, probe) == amp_t{8, 8});
}

TEST_CASE("flush with a pinned block is an error") {
    ScratchDir dir("cache-flushpin");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {2 * 16 * kAmpBytes, 16}, m);
    BlockLease lease = cache.acquire(0);
    CHECK_THROWS_AS(cache.flush(), ValidationError);
}

TEST_CASE("pinned blocks are never evicted") {
    ScratchDir dir("cache-pin");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {2 * 16 * kAmpBytes, 16}, m);

    BlockLease a = cache.acquire(0);
    {
        // The unpinned second resident is the eviction victim even though
        // block 0 is older.
        { BlockLease b = cache.acquire(1); }
        { BlockLease c = cache.acquire(2); }
        CHECK(cache.evictions() == 1);
        CHECK(a.buffer().amps[0] == amp_t{1, 0});
    }

    // Both slots pinned: a third acquire cannot make room.
    BlockLease c = cache.acquire(2);
    CHECK_THROWS_AS(cache.acquire(3), CapacityError);
}

TEST_CASE("mark_dirty by id requires residency") {
    ScratchDir dir("cache-dirtyid");
    BlockStore store = make_filled_store(dir, "s.qvs", 6, 16);
    Metrics m;
    CacheWindow cache(store, {2 * 16 * kAmpBytes, 16}, m);
    { BlockLease l = cache.acquire(1); }
    CHECK_NOTHROW(cache.mark_dirty(1));
    CHECK_THROWS_AS(cache.mark_dirty(3), ValidationError);
    cache.flush();
    CHECK(m.blocks_written == 1);
}

TEST_CASE("resident memory never exceeds the budget and the peak is tracked") {
    ScratchDir dir("cache-peak");
    BlockStore store = make_filled_store(dir, "s.qvs", 8, 16);
    Metrics m;
    const std::uint64_t block_bytes = 16 * kAmpBytes;
    CacheWindow cache(store, {3 * block_bytes, 16}, m);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        { BlockLease l = cache.acquire(rng() % store.n_blocks()); }
        CHECK(cache.resident_bytes() <= cache.capacity_bytes());
        CHECK(m.peak_cache_bytes <= cache.capacity_bytes());
    }
    CHECK(m.peak_cache_bytes == 3 * block_bytes);

    // Flushing recycles buffers instead of freeing them; the peak does not
    // grow past the budget afterwards either.
    cache.flush();
    { BlockLease l = cache.acquire(0); }
    CHECK(m.peak_cache_bytes == 3 * block_bytes);
}

TEST_CASE("randomized access with write-back matches an in-memory model") {
    ScratchDir dir("cache-model");
    const std::uint64_t block_amps = 8;
    BlockStore store = make_filled_store(dir, "s.qvs", 6, block_amps);
    // Model of the full state, kept exactly in sync through plain writes.
    std::vector<amp_t> model(store.n_amps());
    for (std::uint64_t b = 0; b < store.n_blocks(); ++b) {
        for (std::uint64_t j = 0; j < block_amps; ++j) {
            model[b * block_amps + j] = amp_t{static_cast<double>(b + 1), 0};
        }
    }

    Metrics m;
    CacheWindow cache(store, {3 * block_amps * kAmpBytes, block_amps}, m);
    std::mt19937_64 rng(99);
    for (int step = 0; step < 500; ++step) {
        const std::uint64_t b = rng() % store.n_blocks();
        BlockLease lease = cache.acquire(b);
        const std::uint64_t j = rng() % block_amps;
        // Reads must observe every prior write, resident or evicted.
        CHECK(lease.buffer().amps[j] == model[b * block_amps + j]);
        if (rng() % 2 == 0) {
            const amp_t v{static_cast<double>(step), 1.0};
            lease.buffer().amps[j] = v;
            lease.mark_dirty();
            model[b * block_amps + j] = v;
        }
    }
    cache.flush();

    Metrics probe;
    for (std::uint64_t i = 0; i < store.n_amps(); ++i) {
        CHECK(store.read_amplitude(i, probe) == model[i]);
    }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qvsim/metrics.hpp"
#include "qvsim/types.hpp"

namespace qvsim {

inline constexpr std::uint32_t kStoreVersion = 1;
inline constexpr std::uint64_t kHeaderBytes = 32;
inline constexpr std::uint64_t kDefaultBlockAmps = 65536; // 1 MiB blocks
inline constexpr std::uint32_t kMaxQubits = 58;           // 2^58 * 16 fits u64

/// 2^n * 16: byte size of the full amplitude array (header excluded).
std::uint64_t total_bytes(std::uint32_t n_qubits);

/// Number of fixed-size blocks the amplitude array splits into. block_amps
/// must be a power of two and at most 2^n.
std::uint64_t block_layout(std::uint32_t n_qubits, std::uint64_t block_amps);

/// Fixed 32-byte file header.
/// bytes 0-3   magic "QVSV"
/// bytes 4-7   version, little-endian u32
/// bytes 8-11  n_qubits, little-endian u32
/// bytes 12-19 block_amps, little-endian u64
/// bytes 20-31 reserved, zero
struct StoreHeader {
    std::uint32_t version = kStoreVersion;
    std::uint32_t n_qubits = 0;
    std::uint64_t block_amps = 0;

    void serialize(unsigned char (&out)[kHeaderBytes]) const;
    /// Throws FormatError on bad magic or version, ValidationError on
    /// inconsistent sizes.
    static StoreHeader deserialize(const unsigned char (&in)[kHeaderBytes]);
};

/// One block's worth of amplitudes resident in memory.
struct BlockBuffer {
    std::uint64_t block_id = 0;
    std::vector<amp_t> amps;
    bool dirty = false;
};

/// Disk-backed state vector: header + 2^n amplitudes as little-endian float64
/// pairs (real then imaginary), index-ascending, partitioned into power-of-two
/// sized blocks. Block reads of any ids and writes to disjoint ids are safe
/// from concurrent threads (positioned I/O on a shared descriptor).
class BlockStore {
  public:
    /// Create at full length with the |0...0> state (amplitude 1 at index 0).
    static BlockStore create(const std::filesystem::path &path,
                             std::uint32_t n_qubits, std::uint64_t block_amps,
                             bool overwrite = false);
    /// Open and validate an existing store; file length must match the header.
    static BlockStore open(const std::filesystem::path &path);

    BlockStore(BlockStore &&other) noexcept;
    BlockStore &operator=(BlockStore &&other) noexcept;
    BlockStore(const BlockStore &) = delete;
    BlockStore &operator=(const BlockStore &) = delete;
    ~BlockStore();

    const std::filesystem::path &path() const noexcept { return path_; }
    std::uint32_t n_qubits() const noexcept { return header_.n_qubits; }
    std::uint64_t block_amps() const noexcept { return header_.block_amps; }
    std::uint64_t block_bytes() const noexcept {
        return header_.block_amps * kAmpBytes;
    }
    std::uint64_t n_blocks() const noexcept { return n_blocks_; }
    std::uint64_t n_amps() const noexcept {
        return std::uint64_t{1} << header_.n_qubits;
    }

    BlockBuffer read_block(std::uint64_t block_id, Metrics &m) const;
    /// Same as read_block but reuses buf's storage.
    void read_block_into(std::uint64_t block_id, BlockBuffer &buf,
                         Metrics &m) const;
    void write_block(const BlockBuffer &buf, Metrics &m);

    /// Flush written amplitudes to stable storage (fdatasync).
    void sync() const;

    /// Single amplitude, fetched via its containing block.
    amp_t read_amplitude(std::uint64_t index, Metrics &m) const;

    /// sqrt(sum |a_i|^2), streaming every block exactly once.
    double norm(Metrics &m) const;

  private:
    BlockStore(int fd, std::filesystem::path path, StoreHeader header);

    int fd_ = -1;
    std::filesystem::path path_;
    StoreHeader header_;
    std::uint64_t n_blocks_ = 0;
};

} // namespace qvsim

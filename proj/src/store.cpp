#include "qvsim/store.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include "qvsim/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "amplitude serialization assumes a little-endian host");

namespace qvsim {

namespace {

constexpr unsigned char kMagic[4] = {'Q', 'V', 'S', 'V'};

void put_u32(unsigned char *out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out[i] = static_cast<unsigned char>(v >> (8 * i));
    }
}

void put_u64(unsigned char *out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out[i] = static_cast<unsigned char>(v >> (8 * i));
    }
}

std::uint32_t get_u32(const unsigned char *in) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= std::uint32_t{in[i]} << (8 * i);
    }
    return v;
}

std::uint64_t get_u64(const unsigned char *in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= std::uint64_t{in[i]} << (8 * i);
    }
    return v;
}

[[noreturn]] void throw_errno(const std::string &what,
                              const std::filesystem::path &path) {
    throw IoError(what + " '" + path.string() + "': " + std::strerror(errno));
}

void pread_exact(int fd, void *buf, std::size_t len, std::uint64_t offset,
                 const std::filesystem::path &path) {
    auto *p = static_cast<unsigned char *>(buf);
    while (len > 0) {
        const ssize_t n = ::pread(fd, p, len, static_cast<off_t>(offset));
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw_errno("read failed on", path);
        }
        if (n == 0) {
            throw IoError("unexpected end of file in '" + path.string() + "'");
        }
        p += n;
        len -= static_cast<std::size_t>(n);
        offset += static_cast<std::uint64_t>(n);
    }
}

void pwrite_exact(int fd, const void *buf, std::size_t len,
                  std::uint64_t offset, const std::filesystem::path &path) {
    const auto *p = static_cast<const unsigned char *>(buf);
    while (len > 0) {
        const ssize_t n = ::pwrite(fd, p, len, static_cast<off_t>(offset));
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw_errno("write failed on", path);
        }
        p += n;
        len -= static_cast<std::size_t>(n);
        offset += static_cast<std::uint64_t>(n);
    }
}

void check_sizes(std::uint32_t n_qubits, std::uint64_t block_amps) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ValidationError("n_qubits must be in [1, " +
                              std::to_string(kMaxQubits) + "], got " +
                              std::to_string(n_qubits));
    }
    if (block_amps == 0 || !std::has_single_bit(block_amps)) {
        throw ValidationError("block_amps must be a power of two, got " +
                              std::to_string(block_amps));
    }
    if (block_amps > (std::uint64_t{1} << n_qubits)) {
        throw ValidationError("block_amps " + std::to_string(block_amps) +
                              " exceeds state length 2^" +
                              std::to_string(n_qubits));
    }
}

} // namespace

std::uint64_t total_bytes(std::uint32_t n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ValidationError("n_qubits must be in [1, " +
                              std::to_string(kMaxQubits) + "], got " +
                              std::to_string(n_qubits));
    }
    return (std::uint64_t{1} << n_qubits) * kAmpBytes;
}

std::uint64_t block_layout(std::uint32_t n_qubits, std::uint64_t block_amps) {
    check_sizes(n_qubits, block_amps);
    return (std::uint64_t{1} << n_qubits) / block_amps;
}

void StoreHeader::serialize(unsigned char (&out)[kHeaderBytes]) const {
    std::memset(out, 0, kHeaderBytes);
    std::memcpy(out, kMagic, 4);
    put_u32(out + 4, version);
    put_u32(out + 8, n_qubits);
    put_u64(out + 12, block_amps);
    // bytes 20..31 stay zero (reserved)
}

StoreHeader StoreHeader::deserialize(const unsigned char (&in)[kHeaderBytes]) {
    if (std::memcmp(in, kMagic, 4) != 0) {
        throw FormatError("bad magic, not a state file");
    }
    StoreHeader h;
    h.version = get_u32(in + 4);
    if (h.version != kStoreVersion) {
        throw FormatError("unsupported state file version " +
                          std::to_string(h.version));
    }
    h.n_qubits = get_u32(in + 8);
    h.block_amps = get_u64(in + 12);
    check_sizes(h.n_qubits, h.block_amps);
    return h;
}

BlockStore::BlockStore(int fd, std::filesystem::path path, StoreHeader header)
    : fd_(fd), path_(std::move(path)), header_(header),
      n_blocks_(block_layout(header.n_qubits, header.block_amps)) {}

BlockStore::BlockStore(BlockStore &&other) noexcept
    : fd_(other.fd_), path_(std::move(other.path_)), header_(other.header_),
      n_blocks_(other.n_blocks_) {
    other.fd_ = -1;
}

BlockStore &BlockStore::operator=(BlockStore &&other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        fd_ = other.fd_;
        path_ = std::move(other.path_);
        header_ = other.header_;
        n_blocks_ = other.n_blocks_;
        other.fd_ = -1;
    }
    return *this;
}

BlockStore::~BlockStore() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

BlockStore BlockStore::create(const std::filesystem::path &path,
                              std::uint32_t n_qubits, std::uint64_t block_amps,
                              bool overwrite) {
    check_sizes(n_qubits, block_amps);
    int flags = O_RDWR | O_CREAT | (overwrite ? O_TRUNC : O_EXCL);
    const int fd = ::open(path.c_str(), flags, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            throw IoError("file exists (pass overwrite to replace): '" +
                          path.string() + "'");
        }
        throw_errno("cannot create", path);
    }
    StoreHeader header;
    header.n_qubits = n_qubits;
    header.block_amps = block_amps;
    try {
        unsigned char raw[kHeaderBytes];
        header.serialize(raw);
        pwrite_exact(fd, raw, kHeaderBytes, 0, path);
        // Extend to full length; unwritten regions read back as zeros, which
        // is exactly the |0...0> state once amplitude 0 is set.
        const std::uint64_t length = kHeaderBytes + total_bytes(n_qubits);
        if (::ftruncate(fd, static_cast<off_t>(length)) != 0) {
            throw_errno("cannot size", path);
        }
        const double one[2] = {1.0, 0.0};
        pwrite_exact(fd, one, sizeof(one), kHeaderBytes, path);
    } catch (...) {
        ::close(fd);
        throw;
    }
    return BlockStore(fd, path, header);
}

BlockStore BlockStore::open(const std::filesystem::path &path) {
    const int fd = ::open(path.c_str(), O_RDWR);
    if (fd < 0) {
        throw_errno("cannot open", path);
    }
    try {
        struct stat st{};
        if (::fstat(fd, &st) != 0) {
            throw_errno("cannot stat", path);
        }
        if (static_cast<std::uint64_t>(st.st_size) < kHeaderBytes) {
            throw FormatError("file is shorter than the " +
                              std::to_string(kHeaderBytes) + "-byte header");
        }
        unsigned char raw[kHeaderBytes];
        pread_exact(fd, raw, kHeaderBytes, 0, path);
        const StoreHeader header = StoreHeader::deserialize(raw);
        const std::uint64_t expected =
            kHeaderBytes + total_bytes(header.n_qubits);
        if (static_cast<std::uint64_t>(st.st_size) != expected) {
            throw FormatError("file length " + std::to_string(st.st_size) +
                              " does not match header-implied size " +
                              std::to_string(expected));
        }
        return BlockStore(fd, path, header);
    } catch (...) {
        ::close(fd);
        throw;
    }
}

void BlockStore::read_block_into(std::uint64_t block_id, BlockBuffer &buf,
                                 Metrics &m) const {
    if (block_id >= n_blocks_) {
        throw ValidationError("block id " + std::to_string(block_id) +
                              " out of range (n_blocks " +
                              std::to_string(n_blocks_) + ")");
    }
    buf.block_id = block_id;
    buf.amps.resize(header_.block_amps);
    buf.dirty = false;
    const std::uint64_t offset = kHeaderBytes + block_id * block_bytes();
    pread_exact(fd_, buf.amps.data(), block_bytes(), offset, path_);
    m.blocks_read += 1;
    m.bytes_read += block_bytes();
}

BlockBuffer BlockStore::read_block(std::uint64_t block_id, Metrics &m) const {
    BlockBuffer buf;
    read_block_into(block_id, buf, m);
    return buf;
}

void BlockStore::write_block(const BlockBuffer &buf, Metrics &m) {
    if (buf.block_id >= n_blocks_) {
        throw ValidationError("block id " + std::to_string(buf.block_id) +
                              " out of range (n_blocks " +
                              std::to_string(n_blocks_) + ")");
    }
    if (buf.amps.size() != header_.block_amps) {
        throw ValidationError("buffer holds " + std::to_string(buf.amps.size()) +
                              " amplitudes, block size is " +
                              std::to_string(header_.block_amps));
    }
    const std::uint64_t offset = kHeaderBytes + buf.block_id * block_bytes();
    pwrite_exact(fd_, buf.amps.data(), block_bytes(), offset, path_);
    m.blocks_written += 1;
    m.bytes_written += block_bytes();
}

void BlockStore::sync() const {
    if (::fdatasync(fd_) != 0) {
        throw_errno("sync failed on", path_);
    }
}

amp_t BlockStore::read_amplitude(std::uint64_t index, Metrics &m) const {
    if (index >= n_amps()) {
        throw ValidationError("amplitude index " + std::to_string(index) +
                              " out of range");
    }
    const BlockBuffer buf = read_block(index / header_.block_amps, m);
    return buf.amps[index % header_.block_amps];
}

double BlockStore::norm(Metrics &m) const {
    // Kahan-compensated so the result stays trustworthy at 2^26+ terms.
    double sum = 0.0;
    double carry = 0.0;
    BlockBuffer buf;
    for (std::uint64_t b = 0; b < n_blocks_; ++b) {
        read_block_into(b, buf, m);
        for (const amp_t &a : buf.amps) {
            const double term = std::norm(a) - carry;
            const double next = sum + term;
            carry = (next - sum) - term;
            sum = next;
        }
    }
    return std::sqrt(sum);
}

} // namespace qvsim

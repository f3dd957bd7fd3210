#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aded/common.hpp"
#include "aded/trigram_matrix.hpp"

namespace aded {

// Matrix file layout (all integers little-endian):
//   magic "AD3G", u16 version=1, u32 vocab size, u8 flags, u64 context count,
//   per context: u32 first id, u32 second id, u16 entry count,
//                entries as (u32 token, f64 weight),
//   trailing u64 FNV-1a checksum of all preceding bytes.
// Contexts are written in ascending (first, second) order so the image is
// canonical: save . load . save is byte-identical.

inline constexpr unsigned char kMatrixMagic[4] = {0x41, 0x44, 0x33, 0x47};
inline constexpr std::uint16_t kMatrixVersion = 1;

enum class MatrixIoStatus {
    BadMagic,
    UnsupportedVersion,
    Truncated,
    ChecksumMismatch,
};

struct MatrixLoadError : std::runtime_error {
    MatrixIoStatus status;
    MatrixLoadError(MatrixIoStatus s, const std::string& what)
        : std::runtime_error(what), status(s) {}
};

namespace detail {

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

class Reader {
public:
    Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

    std::uint16_t u16() { return static_cast<std::uint16_t>(u_le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(u_le(4)); }
    std::uint64_t u64() { return u_le(8); }
    std::uint8_t u8() { return static_cast<std::uint8_t>(u_le(1)); }

    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::size_t pos() const { return pos_; }

private:
    std::uint64_t u_le(std::size_t n) {
        if (pos_ + n > size_)
            throw MatrixLoadError(MatrixIoStatus::Truncated, "matrix image: truncated payload");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += n;
        return v;
    }

    const unsigned char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string save_matrix_bytes(const TrigramMatrix& m) {
    std::string out;
    out.append(reinterpret_cast<const char*>(kMatrixMagic), 4);
    detail::put_u16(out, kMatrixVersion);
    detail::put_u32(out, m.vocab_size());
    out.push_back(0);  // flags
    detail::put_u64(out, m.context_count());

    std::vector<std::uint64_t> keys;
    keys.reserve(m.context_count());
    for (const auto& [key, table] : m.contexts()) keys.push_back(key);
    std::sort(keys.begin(), keys.end());

    for (std::uint64_t key : keys) {
        const auto& table = m.contexts().at(key);
        auto [a, b] = unpack_context(key);
        detail::put_u32(out, a);
        detail::put_u32(out, b);
        if (table.size() > 0xFFFF)
            throw std::length_error("save_matrix: continuation table exceeds u16 entry count");
        detail::put_u16(out, static_cast<std::uint16_t>(table.size()));
        for (const auto& e : table.entries()) {
            detail::put_u32(out, e.token);
            detail::put_f64(out, e.weight);
        }
    }
    detail::put_u64(out, detail::fnv1a64(reinterpret_cast<const unsigned char*>(out.data()), out.size()));
    return out;
}

namespace detail {

// Walks the payload structure without trusting its contents; used to tell a
// cut-off file apart from an in-place corruption when the checksum fails.
inline bool payload_structure_ok(const unsigned char* data, std::size_t size) {
    try {
        Reader r(data + 4, size - 4 - 8);
        (void)r.u16();
        (void)r.u32();
        (void)r.u8();
        std::uint64_t context_count = r.u64();
        for (std::uint64_t i = 0; i < context_count; ++i) {
            (void)r.u32();
            (void)r.u32();
            std::uint16_t entry_count = r.u16();
            for (std::uint16_t j = 0; j < entry_count; ++j) {
                (void)r.u32();
                (void)r.f64();
            }
        }
        return r.pos() == size - 4 - 8;
    } catch (const MatrixLoadError&) {
        return false;
    }
}

}  // namespace detail

inline TrigramMatrix load_matrix_bytes(const std::string& bytes,
                                       std::size_t retention = kDefaultRetention) {
    constexpr std::size_t kMinSize = 4 + 2 + 4 + 1 + 8 + 8;  // header + checksum
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() >= 4 && std::memcmp(data, kMatrixMagic, 4) != 0)
        throw MatrixLoadError(MatrixIoStatus::BadMagic, "matrix image: bad magic");
    if (bytes.size() < kMinSize)
        throw MatrixLoadError(MatrixIoStatus::Truncated, "matrix image: truncated payload");

    std::uint64_t stored;
    {
        detail::Reader tail(data + bytes.size() - 8, 8);
        stored = tail.u64();
    }
    if (stored != detail::fnv1a64(data, bytes.size() - 8)) {
        if (!detail::payload_structure_ok(data, bytes.size()))
            throw MatrixLoadError(MatrixIoStatus::Truncated, "matrix image: truncated payload");
        throw MatrixLoadError(MatrixIoStatus::ChecksumMismatch, "matrix image: checksum mismatch");
    }

    detail::Reader r(data + 4, bytes.size() - 4 - 8);
    std::uint16_t version = r.u16();
    if (version != kMatrixVersion)
        throw MatrixLoadError(MatrixIoStatus::UnsupportedVersion,
                              "matrix image: unsupported version " + std::to_string(version));
    std::uint32_t vocab_size = r.u32();
    (void)r.u8();  // flags
    std::uint64_t context_count = r.u64();

    TrigramMatrix m(vocab_size, 1, retention);
    for (std::uint64_t i = 0; i < context_count; ++i) {
        TokenId a = r.u32();
        TokenId b = r.u32();
        std::uint16_t entry_count = r.u16();
        ContinuationTable table;
        for (std::uint16_t j = 0; j < entry_count; ++j) {
            TokenId tok = r.u32();
            double w = r.f64();
            table.append_raw(tok, w);
        }
        table.finish();
        m.insert_context(pack_context(a, b), std::move(table));
    }
    if (r.pos() != bytes.size() - 4 - 8)
        throw MatrixLoadError(MatrixIoStatus::Truncated, "matrix image: trailing bytes in payload");
    m.rebuild_backoff();
    return m;
}

inline void save_matrix(const TrigramMatrix& m, const std::string& path) {
    std::string bytes = save_matrix_bytes(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline TrigramMatrix load_matrix(const std::string& path, std::size_t retention = kDefaultRetention) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_matrix_bytes(bytes, retention);
}

}  // namespace aded

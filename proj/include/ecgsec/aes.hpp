#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "ecgsec/error.hpp"

namespace ecgsec {

// One 128-bit cipher block. Inside the cipher the 16 bytes are treated as
// the standard column-major 4x4 state: byte i holds state row i%4, column i/4.
using Block128 = std::array<std::uint8_t, 16>;

// A 128-bit cipher key. Only this key size is supported; other lengths are
// rejected at construction.
class AesKey128 {
public:
    explicit AesKey128(std::span<const std::uint8_t> key_bytes) {
        if (key_bytes.size() != bytes_.size())
            throw error(errc::wrong_length, "AES-128 key must be exactly 16 bytes, got " +
                                                std::to_string(key_bytes.size()));
        std::copy(key_bytes.begin(), key_bytes.end(), bytes_.begin());
    }

    // Parses exactly 32 hex characters (case-insensitive).
    static AesKey128 from_hex(std::string_view hex) {
        if (hex.size() != 32)
            throw error(errc::wrong_length, "AES-128 key must be 32 hex characters, got " +
                                                std::to_string(hex.size()));
        std::array<std::uint8_t, 16> out{};
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = static_cast<std::uint8_t>(hex_nibble(hex[2 * i]) << 4 | hex_nibble(hex[2 * i + 1]));
        return AesKey128(out);
    }

    const std::array<std::uint8_t, 16>& bytes() const noexcept { return bytes_; }

private:
    static std::uint8_t hex_nibble(char c) {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw error(errc::parse_error, std::string("invalid hex character '") + c + "' in key");
    }

    std::array<std::uint8_t, 16> bytes_{};
};

namespace detail {

inline constexpr std::array<std::uint8_t, 256> kSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
};

inline constexpr std::array<std::uint8_t, 256> kInvSbox = {
    0x52, 0x09, 0x6a, 0xd5, 0x30, 0x36, 0xa5, 0x38, 0xbf, 0x40, 0xa3, 0x9e, 0x81, 0xf3, 0xd7, 0xfb,
    0x7c, 0xe3, 0x39, 0x82, 0x9b, 0x2f, 0xff, 0x87, 0x34, 0x8e, 0x43, 0x44, 0xc4, 0xde, 0xe9, 0xcb,
    0x54, 0x7b, 0x94, 0x32, 0xa6, 0xc2, 0x23, 0x3d, 0xee, 0x4c, 0x95, 0x0b, 0x42, 0xfa, 0xc3, 0x4e,
    0x08, 0x2e, 0xa1, 0x66, 0x28, 0xd9, 0x24, 0xb2, 0x76, 0x5b, 0xa2, 0x49, 0x6d, 0x8b, 0xd1, 0x25,
    0x72, 0xf8, 0xf6, 0x64, 0x86, 0x68, 0x98, 0x16, 0xd4, 0xa4, 0x5c, 0xcc, 0x5d, 0x65, 0xb6, 0x92,
    0x6c, 0x70, 0x48, 0x50, 0xfd, 0xed, 0xb9, 0xda, 0x5e, 0x15, 0x46, 0x57, 0xa7, 0x8d, 0x9d, 0x84,
    0x90, 0xd8, 0xab, 0x00, 0x8c, 0xbc, 0xd3, 0x0a, 0xf7, 0xe4, 0x58, 0x05, 0xb8, 0xb3, 0x45, 0x06,
    0xd0, 0x2c, 0x1e, 0x8f, 0xca, 0x3f, 0x0f, 0x02, 0xc1, 0xaf, 0xbd, 0x03, 0x01, 0x13, 0x8a, 0x6b,
    0x3a, 0x91, 0x11, 0x41, 0x4f, 0x67, 0xdc, 0xea, 0x97, 0xf2, 0xcf, 0xce, 0xf0, 0xb4, 0xe6, 0x73,
    0x96, 0xac, 0x74, 0x22, 0xe7, 0xad, 0x35, 0x85, 0xe2, 0xf9, 0x37, 0xe8, 0x1c, 0x75, 0xdf, 0x6e,
    0x47, 0xf1, 0x1a, 0x71, 0x1d, 0x29, 0xc5, 0x89, 0x6f, 0xb7, 0x62, 0x0e, 0xaa, 0x18, 0xbe, 0x1b,
    0xfc, 0x56, 0x3e, 0x4b, 0xc6, 0xd2, 0x79, 0x20, 0x9a, 0xdb, 0xc0, 0xfe, 0x78, 0xcd, 0x5a, 0xf4,
    0x1f, 0xdd, 0xa8, 0x33, 0x88, 0x07, 0xc7, 0x31, 0xb1, 0x12, 0x10, 0x59, 0x27, 0x80, 0xec, 0x5f,
    0x60, 0x51, 0x7f, 0xa9, 0x19, 0xb5, 0x4a, 0x0d, 0x2d, 0xe5, 0x7a, 0x9f, 0x93, 0xc9, 0x9c, 0xef,
    0xa0, 0xe0, 0x3b, 0x4d, 0xae, 0x2a, 0xf5, 0xb0, 0xc8, 0xeb, 0xbb, 0x3c, 0x83, 0x53, 0x99, 0x61,
    0x17, 0x2b, 0x04, 0x7e, 0xba, 0x77, 0xd6, 0x26, 0xe1, 0x69, 0x14, 0x63, 0x55, 0x21, 0x0c, 0x7d,
};

inline constexpr std::array<std::uint8_t, 10> kRcon = {0x01, 0x02, 0x04, 0x08, 0x10,
                                                       0x20, 0x40, 0x80, 0x1b, 0x36};

// Product in GF(2^8) with the AES reduction polynomial x^8+x^4+x^3+x+1.
constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t r = 0;
    for (int i = 0; i < 8; ++i) {
        if (b & 1) r ^= a;
        const bool carry = a & 0x80;
        a = static_cast<std::uint8_t>(a << 1);
        if (carry) a ^= 0x1b;
        b >>= 1;
    }
    return r;
}

inline void add_round_key(Block128& s, const Block128& rk) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] ^= rk[i];
}

inline void sub_bytes(Block128& s) {
    for (auto& b : s) b = kSbox[b];
}

inline void inv_sub_bytes(Block128& s) {
    for (auto& b : s) b = kInvSbox[b];
}

// Row r of the state rotates left by r; on the flat column-major array this
// is a fixed byte permutation.
inline void shift_rows(Block128& s) {
    s = Block128{s[0], s[5],  s[10], s[15], s[4],  s[9], s[14], s[3],
                 s[8], s[13], s[2],  s[7],  s[12], s[1], s[6],  s[11]};
}

inline void inv_shift_rows(Block128& s) {
    s = Block128{s[0], s[13], s[10], s[7],  s[4],  s[1], s[14], s[11],
                 s[8], s[5],  s[2],  s[15], s[12], s[9], s[6],  s[3]};
}

inline void mix_columns(Block128& s) {
    for (std::size_t c = 0; c < 4; ++c) {
        std::uint8_t* col = s.data() + 4 * c;
        const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
        col[0] = gmul(2, a0) ^ gmul(3, a1) ^ a2 ^ a3;
        col[1] = a0 ^ gmul(2, a1) ^ gmul(3, a2) ^ a3;
        col[2] = a0 ^ a1 ^ gmul(2, a2) ^ gmul(3, a3);
        col[3] = gmul(3, a0) ^ a1 ^ a2 ^ gmul(2, a3);
    }
}

inline void inv_mix_columns(Block128& s) {
    for (std::size_t c = 0; c < 4; ++c) {
        std::uint8_t* col = s.data() + 4 * c;
        const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
        col[0] = gmul(0x0e, a0) ^ gmul(0x0b, a1) ^ gmul(0x0d, a2) ^ gmul(0x09, a3);
        col[1] = gmul(0x09, a0) ^ gmul(0x0e, a1) ^ gmul(0x0b, a2) ^ gmul(0x0d, a3);
        col[2] = gmul(0x0d, a0) ^ gmul(0x09, a1) ^ gmul(0x0e, a2) ^ gmul(0x0b, a3);
        col[3] = gmul(0x0b, a0) ^ gmul(0x0d, a1) ^ gmul(0x09, a2) ^ gmul(0x0e, a3);
    }
}

}  // namespace detail

// The 11 round keys of AES-128. round_key(0) is the original key.
class KeySchedule {
public:
    static constexpr std::size_t kRounds = 10;

    explicit KeySchedule(const AesKey128& key) {
        // 44 four-byte words; words 4r..4r+3 form round key r.
        std::array<std::array<std::uint8_t, 4>, 44> w{};
        const auto& kb = key.bytes();
        for (std::size_t i = 0; i < 4; ++i) w[i] = {kb[4 * i], kb[4 * i + 1], kb[4 * i + 2], kb[4 * i + 3]};
        for (std::size_t i = 4; i < w.size(); ++i) {
            auto t = w[i - 1];
            if (i % 4 == 0) {
                t = {t[1], t[2], t[3], t[0]};
                for (auto& b : t) b = detail::kSbox[b];
                t[0] ^= detail::kRcon[i / 4 - 1];
            }
            for (std::size_t j = 0; j < 4; ++j) t[j] = static_cast<std::uint8_t>(t[j] ^ w[i - 4][j]);
            w[i] = t;
        }
        for (std::size_t r = 0; r <= kRounds; ++r)
            for (std::size_t c = 0; c < 4; ++c)
                for (std::size_t j = 0; j < 4; ++j) round_keys_[r][4 * c + j] = w[4 * r + c][j];
    }

    const Block128& round_key(std::size_t round) const { return round_keys_.at(round); }
    const std::array<Block128, kRounds + 1>& round_keys() const noexcept { return round_keys_; }

private:
    std::array<Block128, kRounds + 1> round_keys_{};
};

inline KeySchedule expand_key(const AesKey128& key) { return KeySchedule(key); }

inline Block128 encrypt_block(const Block128& pt, const KeySchedule& ks) {
    Block128 s = pt;
    detail::add_round_key(s, ks.round_key(0));
    for (std::size_t r = 1; r < KeySchedule::kRounds; ++r) {
        detail::sub_bytes(s);
        detail::shift_rows(s);
        detail::mix_columns(s);
        detail::add_round_key(s, ks.round_key(r));
    }
    detail::sub_bytes(s);
    detail::shift_rows(s);
    detail::add_round_key(s, ks.round_key(KeySchedule::kRounds));
    return s;
}

inline Block128 decrypt_block(const Block128& ct, const KeySchedule& ks) {
    Block128 s = ct;
    detail::add_round_key(s, ks.round_key(KeySchedule::kRounds));
    for (std::size_t r = KeySchedule::kRounds - 1; r >= 1; --r) {
        detail::inv_shift_rows(s);
        detail::inv_sub_bytes(s);
        detail::add_round_key(s, ks.round_key(r));
        detail::inv_mix_columns(s);
    }
    detail::inv_shift_rows(s);
    detail::inv_sub_bytes(s);
    detail::add_round_key(s, ks.round_key(0));
    return s;
}

}  // namespace ecgsec

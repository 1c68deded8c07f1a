#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ecgsec/aes.hpp"
#include "ecgsec/ecg_data.hpp"
#include "ecgsec/enroll.hpp"
#include "ecgsec/error.hpp"
#include "ecgsec/identify.hpp"

namespace ecgsec {

inline constexpr std::array<std::uint8_t, 4> kContainerMagic = {'E', 'C', 'G', 'S'};
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 13;  // magic + version + length

// Encrypted payload plus the metadata needed to undo the padding. On disk:
// bytes 0-3 "ECGS", byte 4 version, bytes 5-12 plaintext length as a
// little-endian u64, everything after that the ciphertext blocks.
struct EncryptedContainer {
    std::uint64_t plaintext_len = 0;
    std::vector<std::uint8_t> ciphertext;  // positive multiple of 16
};

namespace detail {

// Padded size is always one block more than the payload fills: a full extra
// block when the payload is already aligned.
inline std::uint64_t padded_length(std::uint64_t plaintext_len) {
    return (plaintext_len / 16 + 1) * 16;
}

}  // namespace detail

// Pads with PKCS#7-style bytes (pad value = pad count, 1..16) and encrypts
// each 16-byte block independently. Blocks are independent by construction,
// so equal plaintext blocks give equal ciphertext blocks under one key.
inline EncryptedContainer encrypt_bytes(std::span<const std::uint8_t> plaintext, const AesKey128& key) {
    if (plaintext.size() >= (std::uint64_t{1} << 63))
        throw error(errc::wrong_length, "plaintext too large");
    const std::uint8_t pad = static_cast<std::uint8_t>(16 - plaintext.size() % 16);

    std::vector<std::uint8_t> padded(plaintext.begin(), plaintext.end());
    padded.insert(padded.end(), pad, pad);

    const KeySchedule ks = expand_key(key);
    EncryptedContainer container;
    container.plaintext_len = plaintext.size();
    container.ciphertext.resize(padded.size());
    for (std::size_t off = 0; off < padded.size(); off += 16) {
        Block128 block;
        std::copy_n(padded.begin() + static_cast<std::ptrdiff_t>(off), 16, block.begin());
        const Block128 ct = encrypt_block(block, ks);
        std::copy(ct.begin(), ct.end(), container.ciphertext.begin() + static_cast<std::ptrdiff_t>(off));
    }
    return container;
}

// Inverse of encrypt_bytes. The pad bytes and the stored length cross-check
// each other: a wrong key almost always surfaces as BAD_PADDING.
inline std::vector<std::uint8_t> decrypt_bytes(const EncryptedContainer& container, const AesKey128& key) {
    const std::size_t ct_len = container.ciphertext.size();
    if (ct_len == 0 || ct_len % 16 != 0 || ct_len != detail::padded_length(container.plaintext_len))
        throw crypto_error(errc::length_mismatch,
                           "ciphertext length " + std::to_string(ct_len) + " does not match plaintext length " +
                               std::to_string(container.plaintext_len));

    const KeySchedule ks = expand_key(key);
    std::vector<std::uint8_t> padded(ct_len);
    for (std::size_t off = 0; off < ct_len; off += 16) {
        Block128 block;
        std::copy_n(container.ciphertext.begin() + static_cast<std::ptrdiff_t>(off), 16, block.begin());
        const Block128 pt = decrypt_block(block, ks);
        std::copy(pt.begin(), pt.end(), padded.begin() + static_cast<std::ptrdiff_t>(off));
    }

    const std::uint8_t pad = padded.back();
    if (pad < 1 || pad > 16)
        throw crypto_error(errc::bad_padding, "pad count " + std::to_string(pad) + " out of range");
    for (std::size_t i = padded.size() - pad; i < padded.size(); ++i)
        if (padded[i] != pad) throw crypto_error(errc::bad_padding, "inconsistent pad bytes");
    if (padded.size() - pad != container.plaintext_len)
        throw crypto_error(errc::length_mismatch,
                           "recovered length " + std::to_string(padded.size() - pad) +
                               " does not match stored length " + std::to_string(container.plaintext_len));

    padded.resize(padded.size() - pad);
    return padded;
}

inline std::vector<std::uint8_t> container_to_bytes(const EncryptedContainer& container) {
    std::vector<std::uint8_t> bytes(kContainerHeaderSize + container.ciphertext.size());
    std::copy(kContainerMagic.begin(), kContainerMagic.end(), bytes.begin());
    bytes[4] = kContainerVersion;
    for (int i = 0; i < 8; ++i)
        bytes[5 + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(container.plaintext_len >> (8 * i));
    std::copy(container.ciphertext.begin(), container.ciphertext.end(),
              bytes.begin() + kContainerHeaderSize);
    return bytes;
}

inline EncryptedContainer container_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw crypto_error(errc::truncated, "container shorter than its magic");
    for (std::size_t i = 0; i < 4; ++i)
        if (bytes[i] != kContainerMagic[i]) throw crypto_error(errc::bad_magic, "container magic mismatch");
    if (bytes.size() < kContainerHeaderSize)
        throw crypto_error(errc::truncated, "container header truncated");
    if (bytes[4] != kContainerVersion)
        throw crypto_error(errc::version_mismatch,
                           "unsupported container version " + std::to_string(bytes[4]));

    EncryptedContainer container;
    for (int i = 0; i < 8; ++i)
        container.plaintext_len |= std::uint64_t{bytes[5 + static_cast<std::size_t>(i)]} << (8 * i);
    container.ciphertext.assign(bytes.begin() + kContainerHeaderSize, bytes.end());
    if (container.ciphertext.empty() || container.ciphertext.size() % 16 != 0)
        throw crypto_error(errc::length_mismatch, "ciphertext must be a positive multiple of 16 bytes, got " +
                                                      std::to_string(container.ciphertext.size()));
    return container;
}

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(errc::io_error, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes;
    char chunk[4096];
    while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0)
        bytes.insert(bytes.end(), chunk, chunk + in.gcount());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error(errc::io_error, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw error(errc::io_error, "failed writing " + path.string());
}

}  // namespace detail

inline void write_container(const std::filesystem::path& path, const EncryptedContainer& container) {
    detail::write_file_bytes(path, container_to_bytes(container));
}

inline EncryptedContainer read_container(const std::filesystem::path& path) {
    return container_from_bytes(detail::read_file_bytes(path));
}

// Decrypt, deserialize, identify: the result matches identifying the
// original record because the canonical byte round-trip is exact.
inline MatchResult secure_identify(const EncryptedContainer& container, const AesKey128& key,
                                   const EnrollmentModel& model) {
    const std::vector<std::uint8_t> plaintext = decrypt_bytes(container, key);
    const EcgRecord record = deserialize_record(plaintext);
    return identify(model, record);
}

}  // namespace ecgsec

#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecgsec/error.hpp"

namespace ecgsec {

inline constexpr std::size_t kDefaultSampleCount = 300;

// One labeled ECG signal. Samples are single-precision: the canonical wire
// format carries 32 bits per sample, so that is what the record stores.
struct EcgRecord {
    int subject_id = 0;
    std::vector<float> samples;
};

enum class Split { kTrain, kTest };

struct ManifestEntry {
    std::filesystem::path path;
    int subject_id = 0;
    Split split = Split::kTrain;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

struct Dataset {
    std::vector<EcgRecord> train;
    std::vector<EcgRecord> test;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Strict full-token parse; out_of_range values are reported as non-finite
// since they cannot be stored.
inline double parse_sample(std::string_view token, const std::string& where) {
    token = trim(token);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw error(errc::non_finite, where + ": value out of range: '" + std::string(token) + "'");
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw error(errc::parse_error, where + ": not a number: '" + std::string(token) + "'");
    return value;
}

inline long parse_int(std::string_view token, const std::string& where) {
    token = trim(token);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw error(errc::parse_error, where + ": not an integer: '" + std::string(token) + "'");
    return value;
}

}  // namespace detail

// Reads one signal from a text file: one decimal sample per line, exactly n
// lines, optional trailing newline.
inline EcgRecord load_record(const std::filesystem::path& path, int subject_id, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw error(errc::io_error, "cannot open record file " + path.string());

    EcgRecord record;
    record.subject_id = subject_id;
    record.samples.reserve(n);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path.filename().string() + ": line " + std::to_string(line_no);
        const double value = detail::parse_sample(line, where);
        if (!std::isfinite(value)) throw error(errc::non_finite, where + ": sample is not finite");
        const float sample = static_cast<float>(value);
        if (!std::isfinite(sample))
            throw error(errc::non_finite, where + ": sample does not fit single precision");
        record.samples.push_back(sample);
    }
    if (record.samples.size() != n)
        throw error(errc::wrong_length, path.string() + ": expected " + std::to_string(n) +
                                            " samples, got " + std::to_string(record.samples.size()));
    return record;
}

// Parses a CSV manifest with header `path,subject_id,split`. Relative entry
// paths are resolved against the manifest's own directory so a dataset can
// be moved as a unit.
inline Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::io_error, "cannot open manifest " + path.string());

    const std::filesystem::path base = path.parent_path();
    Manifest manifest;
    std::set<std::string> seen_paths;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = detail::trim(line);
        const std::string where = path.filename().string() + ": line " + std::to_string(line_no);
        if (line_no == 1) {
            if (row != "path,subject_id,split")
                throw error(errc::parse_error, where + ": expected header 'path,subject_id,split'");
            continue;
        }
        const std::size_t c1 = row.find(',');
        const std::size_t c2 = c1 == std::string_view::npos ? std::string_view::npos : row.find(',', c1 + 1);
        if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos)
            throw error(errc::parse_error, where + ": expected 3 comma-separated fields");

        const std::string raw_path(detail::trim(row.substr(0, c1)));
        if (raw_path.empty()) throw error(errc::parse_error, where + ": empty path");
        if (!seen_paths.insert(raw_path).second)
            throw error(errc::parse_error, where + ": duplicate path '" + raw_path + "'");

        const long subject = detail::parse_int(row.substr(c1 + 1, c2 - c1 - 1), where);
        if (subject < 0) throw error(errc::parse_error, where + ": subject_id must be non-negative");

        const std::string_view split_token = detail::trim(row.substr(c2 + 1));
        Split split{};
        if (split_token == "TRAIN")
            split = Split::kTrain;
        else if (split_token == "TEST")
            split = Split::kTest;
        else
            throw error(errc::parse_error, where + ": split must be TRAIN or TEST, got '" +
                                               std::string(split_token) + "'");

        std::filesystem::path entry_path(raw_path);
        if (entry_path.is_relative()) entry_path = base / entry_path;
        manifest.entries.push_back({std::move(entry_path), static_cast<int>(subject), split});
    }
    return manifest;
}

// Loads every manifest entry and enforces the closed-set contract: at least
// two training records, and every TEST subject enrolled in TRAIN.
inline Dataset load_dataset(const Manifest& manifest, std::size_t n) {
    Dataset dataset;
    for (const auto& entry : manifest.entries) {
        EcgRecord record = load_record(entry.path, entry.subject_id, n);
        (entry.split == Split::kTrain ? dataset.train : dataset.test).push_back(std::move(record));
    }
    if (dataset.train.size() < 2)
        throw error(errc::insufficient_training, "need at least 2 training records, got " +
                                                     std::to_string(dataset.train.size()));
    std::set<int> trained;
    for (const auto& r : dataset.train) trained.insert(r.subject_id);
    for (const auto& r : dataset.test)
        if (!trained.count(r.subject_id))
            throw error(errc::open_set_subject,
                        "test subject " + std::to_string(r.subject_id) + " has no training record");
    return dataset;
}

// Canonical plaintext bytes: each sample as a 32-bit little-endian IEEE-754
// single, concatenated in order. Subject labels are not encoded.
inline std::vector<std::uint8_t> serialize_record(const EcgRecord& record) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(record.samples.size() * 4);
    for (float sample : record.samples) {
        const auto u = std::bit_cast<std::uint32_t>(sample);
        bytes.push_back(static_cast<std::uint8_t>(u));
        bytes.push_back(static_cast<std::uint8_t>(u >> 8));
        bytes.push_back(static_cast<std::uint8_t>(u >> 16));
        bytes.push_back(static_cast<std::uint8_t>(u >> 24));
    }
    return bytes;
}

// Exact inverse of serialize_record. The subject id is not part of the wire
// format, so the returned record carries subject_id 0.
inline EcgRecord deserialize_record(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 4 != 0)
        throw error(errc::wrong_length, "canonical record bytes must be a multiple of 4, got " +
                                            std::to_string(bytes.size()));
    EcgRecord record;
    record.samples.reserve(bytes.size() / 4);
    for (std::size_t i = 0; i < bytes.size(); i += 4) {
        const std::uint32_t u = static_cast<std::uint32_t>(bytes[i]) |
                                static_cast<std::uint32_t>(bytes[i + 1]) << 8 |
                                static_cast<std::uint32_t>(bytes[i + 2]) << 16 |
                                static_cast<std::uint32_t>(bytes[i + 3]) << 24;
        const float sample = std::bit_cast<float>(u);
        if (!std::isfinite(sample))
            throw error(errc::non_finite, "sample " + std::to_string(i / 4) + " is not finite");
        record.samples.push_back(sample);
    }
    return record;
}

}  // namespace ecgsec

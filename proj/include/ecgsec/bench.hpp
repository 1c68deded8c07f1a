#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ecgsec/aes.hpp"
#include "ecgsec/enroll.hpp"
#include "ecgsec/error.hpp"
#include "ecgsec/identify.hpp"

namespace ecgsec {

enum class BenchOp { kCipher, kDecipher, kIdentify };

// One measurement: mean time per invocation plus the frequency f = 1/t and
// throughput T = B*f derived from it.
struct BenchReport {
    std::string op_name;
    double block_bits = 0.0;
    double mean_exec_time = 0.0;         // seconds per invocation
    double exec_frequency = 0.0;         // hertz
    double throughput = 0.0;             // bits per second
    std::uint64_t iterations = 0;
    double time_source_resolution = 0.0;  // seconds
};

namespace detail {

inline constexpr std::uint64_t kBenchSeed = 0xEC6;  // fixed so inputs are reproducible

inline double clock_resolution() {
    using period = std::chrono::steady_clock::period;
    return static_cast<double>(period::num) / static_cast<double>(period::den);
}

inline Block128 random_block(std::mt19937_64& rng) {
    Block128 b;
    for (auto& byte : b) byte = static_cast<std::uint8_t>(rng());
    return b;
}

inline EcgRecord random_record(std::mt19937_64& rng, int subject_id, std::size_t n, double amplitude) {
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    EcgRecord record;
    record.subject_id = subject_id;
    record.samples.resize(n);
    for (auto& s : record.samples) s = static_cast<float>(dist(rng));
    return record;
}

}  // namespace detail

inline BenchReport make_bench_report(std::string op_name, double block_bits, double mean_exec_time,
                                     std::uint64_t iterations) {
    BenchReport report;
    report.op_name = std::move(op_name);
    report.block_bits = block_bits;
    report.mean_exec_time = mean_exec_time;
    report.exec_frequency = 1.0 / mean_exec_time;
    report.throughput = block_bits * report.exec_frequency;
    report.iterations = iterations;
    report.time_source_resolution = detail::clock_resolution();
    return report;
}

// Times one operation with a monotonic clock: warmup iterations are run and
// discarded, then mean_exec_time = elapsed / iterations over the timed loop.
// Inputs are pre-generated from a fixed seed so reruns touch the same data.
// AES measurements are forced to at least 1000 iterations.
inline BenchReport bench(BenchOp op, std::uint64_t iterations, std::uint64_t warmup = 100) {
    iterations = std::max<std::uint64_t>(iterations, 1);
    std::mt19937_64 rng(detail::kBenchSeed);
    using clock = std::chrono::steady_clock;

    const auto finish = [](std::string name, double block_bits, std::uint64_t iters,
                           clock::time_point t0, clock::time_point t1, std::uint8_t sink) {
        volatile std::uint8_t keep = sink;
        (void)keep;
        double mean = std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(iters);
        if (mean <= 0.0) mean = detail::clock_resolution() / static_cast<double>(iters);
        return make_bench_report(std::move(name), block_bits, mean, iters);
    };

    if (op == BenchOp::kCipher || op == BenchOp::kDecipher) {
        iterations = std::max<std::uint64_t>(iterations, 1000);
        const AesKey128 key(detail::random_block(rng));
        const KeySchedule ks = expand_key(key);
        std::vector<Block128> pool(256);
        for (auto& b : pool) b = detail::random_block(rng);

        std::uint8_t sink = 0;
        const bool encrypt = op == BenchOp::kCipher;
        for (std::uint64_t i = 0; i < warmup; ++i) {
            const Block128 out = encrypt ? encrypt_block(pool[i % pool.size()], ks)
                                         : decrypt_block(pool[i % pool.size()], ks);
            sink ^= out[0];
        }
        const auto t0 = clock::now();
        for (std::uint64_t i = 0; i < iterations; ++i) {
            const Block128 out = encrypt ? encrypt_block(pool[i % pool.size()], ks)
                                         : decrypt_block(pool[i % pool.size()], ks);
            sink ^= out[0];
        }
        const auto t1 = clock::now();
        return finish(encrypt ? "cipher" : "decipher", 128.0, iterations, t0, t1, sink);
    }

    // Identification: enroll a synthetic gallery once, then time identify().
    const std::size_t n = kDefaultSampleCount;
    const int subjects = 20;
    std::vector<EcgRecord> training;
    training.reserve(subjects);
    for (int id = 0; id < subjects; ++id) training.push_back(detail::random_record(rng, id, n, 100.0));
    const EnrollmentModel model = enroll(training, 1.0);

    std::vector<EcgRecord> probes(64);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        probes[i] = training[i % training.size()];
        for (auto& s : probes[i].samples) s += static_cast<float>(noise(rng));
    }

    std::uint8_t sink = 0;
    for (std::uint64_t i = 0; i < warmup; ++i)
        sink ^= static_cast<std::uint8_t>(identify(model, probes[i % probes.size()]).subject_id);
    const auto t0 = clock::now();
    for (std::uint64_t i = 0; i < iterations; ++i)
        sink ^= static_cast<std::uint8_t>(identify(model, probes[i % probes.size()]).subject_id);
    const auto t1 = clock::now();
    return finish("identify", static_cast<double>(n) * 32.0, iterations, t0, t1, sink);
}

// "5.10 Mbit/s" style text; the unit is always spelled out.
inline std::string format_throughput(double bits_per_second) {
    const char* unit = "bit/s";
    double value = bits_per_second;
    if (bits_per_second >= 1e9) {
        unit = "Gbit/s";
        value = bits_per_second / 1e9;
    } else if (bits_per_second >= 1e6) {
        unit = "Mbit/s";
        value = bits_per_second / 1e6;
    } else if (bits_per_second >= 1e3) {
        unit = "kbit/s";
        value = bits_per_second / 1e3;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f %s", value, unit);
    return buf;
}

inline void write_bench_csv(const BenchReport& report, std::ostream& out) {
    char buf[32];
    out << "op_name,block_bits,iterations,mean_exec_time_s,exec_frequency_hz,"
           "throughput_bits_per_s,time_source_resolution_s\n";
    out << report.op_name << ',' << report.block_bits << ',' << report.iterations;
    for (double v : {report.mean_exec_time, report.exec_frequency, report.throughput,
                     report.time_source_resolution}) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
    }
    out << '\n';
}

}  // namespace ecgsec

// Command-line front end: enrollment, identification, record encryption and
// the timing harness. Exit codes: 0 success, 1 usage error, 2 data/format
// error, 3 crypto error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "ecgsec/ecgsec.hpp"

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ecgsec::AesKey128 parse_key(const std::string& hex) {
    try {
        return ecgsec::AesKey128::from_hex(hex);
    } catch (const ecgsec::error& e) {
        throw usage_error(std::string("--key: ") + e.what());
    }
}

void print_match(const ecgsec::MatchResult& match, const ecgsec::EnrollmentModel& model) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", match.distance_sq);
    std::cout << "predicted_id " << match.subject_id << "\n";
    std::cout << "distance_sq " << buf << "\n";
    const std::size_t top = std::min<std::size_t>(3, match.ranking.size());
    for (std::size_t r = 0; r < top; ++r) {
        const auto& [index, dist] = match.ranking[r];
        std::snprintf(buf, sizeof(buf), "%.17g", dist);
        std::cout << "rank " << r + 1 << " gallery " << index << " subject " << model.subject_ids[index]
                  << " distance_sq " << buf << "\n";
    }
}

std::size_t count_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ecgsec::error(ecgsec::errc::io_error, "cannot open " + path.string());
    std::size_t count = 0;
    std::string line;
    while (std::getline(in, line)) ++count;
    return count;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AES-128 encryption and PCA-based subject identification for ECG records"};
    app.require_subcommand(1);

    // enroll
    auto* enroll_cmd = app.add_subcommand("enroll", "Build an identification model from training records");
    std::string enroll_manifest, enroll_out;
    double enroll_threshold = 1.0;
    std::size_t enroll_n = ecgsec::kDefaultSampleCount;
    enroll_cmd->add_option("--manifest", enroll_manifest, "manifest CSV (path,subject_id,split)")->required();
    enroll_cmd->add_option("--out", enroll_out, "model file to write")->required();
    enroll_cmd->add_option("--threshold", enroll_threshold, "eigenvalue cutoff")->capture_default_str();
    enroll_cmd->add_option("--n", enroll_n, "samples per record")->capture_default_str();
    enroll_cmd->callback([&] {
        const ecgsec::Dataset dataset =
            ecgsec::load_dataset(ecgsec::load_manifest(enroll_manifest), enroll_n);
        const ecgsec::EnrollmentModel model = ecgsec::enroll(dataset.train, enroll_threshold);
        ecgsec::save_model(model, enroll_out);
        std::cerr << "enrolled " << model.k << " training signals, kept " << model.m_feat
                  << " features; model written to " << enroll_out << "\n";
    });

    // identify
    auto* identify_cmd = app.add_subcommand("identify", "Identify one probe record against a model");
    std::string identify_model, identify_probe;
    identify_cmd->add_option("--model", identify_model, "model file")->required();
    identify_cmd->add_option("--probe", identify_probe, "probe record (text, one sample per line)")->required();
    identify_cmd->callback([&] {
        const ecgsec::EnrollmentModel model = ecgsec::load_model(identify_model);
        const ecgsec::EcgRecord probe = ecgsec::load_record(identify_probe, 0, model.n);
        print_match(ecgsec::identify(model, probe), model);
    });

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Run the TEST split of a manifest against a model");
    std::string evaluate_model, evaluate_manifest, evaluate_report;
    unsigned evaluate_threads = 1;
    evaluate_cmd->add_option("--model", evaluate_model, "model file")->required();
    evaluate_cmd->add_option("--manifest", evaluate_manifest, "manifest CSV")->required();
    evaluate_cmd->add_option("--report", evaluate_report, "CSV report to write")->required();
    evaluate_cmd->add_option("--threads", evaluate_threads, "worker threads")->capture_default_str();
    evaluate_cmd->callback([&] {
        const ecgsec::EnrollmentModel model = ecgsec::load_model(evaluate_model);
        const ecgsec::Dataset dataset =
            ecgsec::load_dataset(ecgsec::load_manifest(evaluate_manifest), model.n);
        const ecgsec::RecognitionReport report = ecgsec::evaluate(model, dataset.test, evaluate_threads);
        std::ofstream out(evaluate_report, std::ios::binary);
        if (!out)
            throw ecgsec::error(ecgsec::errc::io_error, "cannot open " + evaluate_report + " for writing");
        ecgsec::write_report_csv(report, out);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", report.rate);
        std::cout << "recognition_rate " << buf << " (" << report.correct << "/" << report.total << ")\n";
        std::cerr << "report written to " << evaluate_report << "\n";
    });

    // encrypt
    auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a file into an ECGS container");
    std::string encrypt_key, encrypt_in, encrypt_out;
    bool encrypt_record = false;
    encrypt_cmd->add_option("--key", encrypt_key, "128-bit key, 32 hex chars")
        ->envname("ECGSEC_KEY")
        ->required();
    encrypt_cmd->add_option("--in", encrypt_in, "input file")->required();
    encrypt_cmd->add_option("--out", encrypt_out, "container file to write")->required();
    encrypt_cmd->add_flag("--record", encrypt_record,
                          "treat the input as a record text file and encrypt its canonical "
                          "32-bit serialization (required for secure-identify)");
    encrypt_cmd->callback([&] {
        const ecgsec::AesKey128 key = parse_key(encrypt_key);
        std::vector<std::uint8_t> plaintext;
        if (encrypt_record) {
            const std::size_t n = count_lines(encrypt_in);
            plaintext = ecgsec::serialize_record(ecgsec::load_record(encrypt_in, 0, n));
        } else {
            plaintext = ecgsec::detail::read_file_bytes(encrypt_in);
        }
        ecgsec::write_container(encrypt_out, ecgsec::encrypt_bytes(plaintext, key));
        std::cerr << "warning: blocks are encrypted independently (ECB); equal 16-byte plaintext "
                     "blocks produce equal ciphertext blocks\n";
        std::cerr << "container written to " << encrypt_out << "\n";
    });

    // decrypt
    auto* decrypt_cmd = app.add_subcommand("decrypt", "Decrypt an ECGS container back to a file");
    std::string decrypt_key, decrypt_in, decrypt_out;
    decrypt_cmd->add_option("--key", decrypt_key, "128-bit key, 32 hex chars")
        ->envname("ECGSEC_KEY")
        ->required();
    decrypt_cmd->add_option("--in", decrypt_in, "container file")->required();
    decrypt_cmd->add_option("--out", decrypt_out, "plaintext file to write")->required();
    decrypt_cmd->callback([&] {
        const ecgsec::AesKey128 key = parse_key(decrypt_key);
        const std::vector<std::uint8_t> plaintext =
            ecgsec::decrypt_bytes(ecgsec::read_container(decrypt_in), key);
        ecgsec::detail::write_file_bytes(decrypt_out, plaintext);
        std::cerr << "plaintext written to " << decrypt_out << "\n";
    });

    // secure-identify
    auto* secure_cmd = app.add_subcommand("secure-identify", "Decrypt a container and identify the record");
    std::string secure_key, secure_model, secure_in;
    secure_cmd->add_option("--key", secure_key, "128-bit key, 32 hex chars")
        ->envname("ECGSEC_KEY")
        ->required();
    secure_cmd->add_option("--model", secure_model, "model file")->required();
    secure_cmd->add_option("--in", secure_in, "container holding a serialized record")->required();
    secure_cmd->callback([&] {
        const ecgsec::AesKey128 key = parse_key(secure_key);
        const ecgsec::EnrollmentModel model = ecgsec::load_model(secure_model);
        print_match(ecgsec::secure_identify(ecgsec::read_container(secure_in), key, model), model);
    });

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Time one operation and report frequency and throughput");
    std::string bench_op = "cipher";
    std::uint64_t bench_iters = 10000;
    std::uint64_t bench_warmup = 100;
    bench_cmd->add_option("--op", bench_op, "operation to time")
        ->check(CLI::IsMember({"cipher", "decipher", "identify"}))
        ->required();
    bench_cmd->add_option("--iters", bench_iters, "timed iterations (AES ops run at least 1000)")
        ->capture_default_str();
    bench_cmd->add_option("--warmup", bench_warmup, "discarded warmup iterations")->capture_default_str();
    bench_cmd->callback([&] {
        const ecgsec::BenchOp op = bench_op == "cipher"      ? ecgsec::BenchOp::kCipher
                                   : bench_op == "decipher" ? ecgsec::BenchOp::kDecipher
                                                            : ecgsec::BenchOp::kIdentify;
        const ecgsec::BenchReport report = ecgsec::bench(op, bench_iters, bench_warmup);
        ecgsec::write_bench_csv(report, std::cout);
        std::fprintf(stderr, "%s: %.3f us/op over %llu iterations; f = %.2f kHz; T = %s\n",
                     report.op_name.c_str(), report.mean_exec_time * 1e6,
                     static_cast<unsigned long long>(report.iterations), report.exec_frequency / 1e3,
                     ecgsec::format_throughput(report.throughput).c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ecgsec::crypto_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ecgsec::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

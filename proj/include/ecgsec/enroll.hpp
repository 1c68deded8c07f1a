#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ecgsec/ecg_data.hpp"
#include "ecgsec/error.hpp"
#include "ecgsec/linalg.hpp"

namespace ecgsec {

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

// Everything identification needs: the training mean, the retained basis
// signals (one per row, unit norm), and the projected training gallery.
struct EnrollmentModel {
    std::size_t n = 0;       // samples per signal
    std::size_t k = 0;       // enrolled training signals
    std::size_t m_feat = 0;  // retained features
    std::vector<double> mean;
    Matrix eigen_ecg;              // m_feat x n
    Matrix gallery;                // k x m_feat, row i = projection of training signal i
    std::vector<int> subject_ids;  // k
};

inline std::vector<double> compute_mean(std::span<const EcgRecord> training) {
    if (training.empty()) throw error(errc::empty_training, "no training records");
    const std::size_t n = training.front().samples.size();
    std::vector<double> mean(n, 0.0);
    for (const auto& record : training) {
        if (record.samples.size() != n)
            throw error(errc::dimension_mismatch, "training record has " +
                                                      std::to_string(record.samples.size()) +
                                                      " samples, expected " + std::to_string(n));
        for (std::size_t s = 0; s < n; ++s) mean[s] += record.samples[s];
    }
    for (double& m : mean) m /= static_cast<double>(training.size());
    return mean;
}

// Column j holds training signal j minus the mean; n rows, k columns.
inline Matrix build_deviation_matrix(std::span<const EcgRecord> training, std::span<const double> mean) {
    const std::size_t n = mean.size();
    Matrix a(n, training.size());
    for (std::size_t j = 0; j < training.size(); ++j) {
        if (training[j].samples.size() != n)
            throw error(errc::dimension_mismatch, "training record " + std::to_string(j) + " has " +
                                                      std::to_string(training[j].samples.size()) +
                                                      " samples, expected " + std::to_string(n));
        for (std::size_t s = 0; s < n; ++s) a(s, j) = training[j].samples[s] - mean[s];
    }
    return a;
}

// L = A'A, the k x k stand-in for the n x n covariance A A'. Each entry is
// computed once and mirrored, so the result is symmetric to the bit.
inline Matrix surrogate_matrix(const Matrix& a) {
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    Matrix l(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double acc = 0.0;
            for (std::size_t s = 0; s < n; ++s) acc += a(s, i) * a(s, j);
            l(i, j) = acc;
            l(j, i) = acc;
        }
    }
    return l;
}

// Full eigendecomposition of L = A'A, sorted by descending eigenvalue.
// Equal eigenvalues keep the eigensolver's output order.
inline std::vector<EigenPair> surrogate_eigen(const Matrix& a, double rel_tol = 1e-12) {
    const std::size_t k = a.cols();
    if (k < 2)
        throw error(errc::insufficient_training, "need at least 2 training signals, got " + std::to_string(k));
    const Matrix l = surrogate_matrix(a);
    const SymmetricEigen eig = jacobi_eigen_symmetric(l, rel_tol);

    std::vector<EigenPair> pairs(k);
    for (std::size_t j = 0; j < k; ++j) {
        pairs[j].value = eig.values[j];
        pairs[j].vector.resize(k);
        for (std::size_t i = 0; i < k; ++i) pairs[j].vector[i] = eig.vectors(i, j);
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });
    return pairs;
}

// Keeps the eigenpairs whose eigenvalue clears the threshold and maps each
// kept k-vector v back to signal space as A*v, normalized to unit length
// with the first nonzero component positive. Rows of the result are the
// retained basis signals.
inline Matrix select_and_recover(const Matrix& a, std::span<const EigenPair> pairs, double threshold = 1.0) {
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    std::vector<std::vector<double>> rows;
    for (const EigenPair& pair : pairs) {
        if (pair.value < threshold) continue;
        if (pair.vector.size() != k)
            throw error(errc::dimension_mismatch, "eigenvector length " + std::to_string(pair.vector.size()) +
                                                      " does not match column count " + std::to_string(k));
        std::vector<double> u(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) acc += a(s, j) * pair.vector[j];
            u[s] = acc;
        }
        double norm = 0.0;
        for (double x : u) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;  // zero-variance direction, nothing to recover
        for (double& x : u) x /= norm;
        for (double x : u) {
            if (x == 0.0) continue;
            if (x < 0.0)
                for (double& y : u) y = -y;
            break;
        }
        rows.push_back(std::move(u));
    }
    if (rows.empty())
        throw error(errc::no_features, "all " + std::to_string(pairs.size()) +
                                           " eigenvalues fall below threshold " + std::to_string(threshold));
    Matrix e(rows.size(), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t s = 0; s < n; ++s) e(r, s) = rows[r][s];
    return e;
}

// Feature vector of one signal: subtract the mean, then take the inner
// product with each basis row. Summation order is fixed so repeated runs
// give identical bits.
inline std::vector<double> project_signal(const Matrix& eigen_ecg, std::span<const double> mean,
                                          std::span<const float> samples) {
    const std::size_t n = mean.size();
    if (samples.size() != n)
        throw error(errc::dimension_mismatch, "signal has " + std::to_string(samples.size()) +
                                                  " samples, model expects " + std::to_string(n));
    std::vector<double> p(eigen_ecg.rows(), 0.0);
    for (std::size_t j = 0; j < eigen_ecg.rows(); ++j) {
        double acc = 0.0;
        for (std::size_t s = 0; s < n; ++s) acc += eigen_ecg(j, s) * (samples[s] - mean[s]);
        p[j] = acc;
    }
    return p;
}

inline EnrollmentModel enroll(std::span<const EcgRecord> training, double threshold = 1.0) {
    if (training.size() < 2)
        throw error(errc::insufficient_training,
                    "need at least 2 training records, got " + std::to_string(training.size()));

    EnrollmentModel model;
    model.mean = compute_mean(training);
    const Matrix a = build_deviation_matrix(training, model.mean);
    const std::vector<EigenPair> pairs = surrogate_eigen(a);
    model.eigen_ecg = select_and_recover(a, pairs, threshold);
    model.n = model.mean.size();
    model.k = training.size();
    model.m_feat = model.eigen_ecg.rows();

    model.gallery = Matrix(model.k, model.m_feat);
    model.subject_ids.resize(model.k);
    for (std::size_t i = 0; i < model.k; ++i) {
        const std::vector<double> p = project_signal(model.eigen_ecg, model.mean, training[i].samples);
        for (std::size_t j = 0; j < model.m_feat; ++j) model.gallery(i, j) = p[j];
        model.subject_ids[i] = training[i].subject_id;
    }
    return model;
}

namespace detail {

// 17 significant digits round-trip a double exactly through text.
inline void append_double(std::string& out, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out += buf;
}

class ModelReader {
public:
    explicit ModelReader(std::string_view text) : text_(text) {}

    std::string_view next_token() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
        if (pos_ >= text_.size()) throw error(errc::truncated, "model file ends before expected data");
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\n' && text_[pos_] != '\r')
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    double next_double() {
        const std::string_view token = next_token();
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw error(errc::parse_error, "model file: not a number: '" + std::string(token) + "'");
        if (!std::isfinite(value))
            throw error(errc::non_finite, "model file: non-finite value '" + std::string(token) + "'");
        return value;
    }

    long next_integer() {
        const std::string_view token = next_token();
        long value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw error(errc::parse_error, "model file: not an integer: '" + std::string(token) + "'");
        return value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Textual model format, line oriented:
//   line 1: ECGMODEL v1
//   line 2: n k m_feat
//   line 3: mean (n values)
//   next m_feat lines: one basis row each (n values)
//   next k lines: subject_id followed by the m_feat gallery values
inline std::string model_to_string(const EnrollmentModel& model) {
    std::string out = "ECGMODEL v1\n";
    out += std::to_string(model.n) + " " + std::to_string(model.k) + " " + std::to_string(model.m_feat) + "\n";
    for (std::size_t s = 0; s < model.n; ++s) {
        if (s) out += ' ';
        detail::append_double(out, model.mean[s]);
    }
    out += '\n';
    for (std::size_t j = 0; j < model.m_feat; ++j) {
        for (std::size_t s = 0; s < model.n; ++s) {
            if (s) out += ' ';
            detail::append_double(out, model.eigen_ecg(j, s));
        }
        out += '\n';
    }
    for (std::size_t i = 0; i < model.k; ++i) {
        out += std::to_string(model.subject_ids[i]);
        for (std::size_t j = 0; j < model.m_feat; ++j) {
            out += ' ';
            detail::append_double(out, model.gallery(i, j));
        }
        out += '\n';
    }
    return out;
}

inline EnrollmentModel model_from_string(std::string_view text) {
    if (text.empty()) throw error(errc::truncated, "empty model file");
    const std::size_t eol = text.find('\n');
    const std::size_t header_len = eol == std::string_view::npos ? text.size() : eol;
    std::string_view header = text.substr(0, header_len);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    const std::size_t space = header.find(' ');
    const std::string_view magic = header.substr(0, space);
    if (magic != "ECGMODEL")
        throw error(errc::bad_magic, "model file does not start with 'ECGMODEL'");
    if (space == std::string_view::npos || header.substr(space + 1) != "v1")
        throw error(errc::version_mismatch, "unsupported model version '" +
                                                std::string(space == std::string_view::npos
                                                                ? std::string_view{}
                                                                : header.substr(space + 1)) +
                                                "'");
    if (eol == std::string_view::npos) throw error(errc::truncated, "model file ends after header");

    detail::ModelReader reader(text.substr(eol + 1));
    const long n = reader.next_integer();
    const long k = reader.next_integer();
    const long m_feat = reader.next_integer();
    constexpr long kDimensionCap = 1'000'000'000;
    if (n < 1 || k < 1 || m_feat < 1 || m_feat > k || n > kDimensionCap || k > kDimensionCap)
        throw error(errc::parse_error, "model file: invalid dimensions n=" + std::to_string(n) +
                                           " k=" + std::to_string(k) + " m_feat=" + std::to_string(m_feat));
    // every value needs at least two characters (digit + separator), so the
    // declared dimensions cannot outrun the file; checked before allocating
    const std::uint64_t total_values = static_cast<std::uint64_t>(n) * (1 + static_cast<std::uint64_t>(m_feat)) +
                                       static_cast<std::uint64_t>(k) * (1 + static_cast<std::uint64_t>(m_feat));
    if (total_values > text.size() / 2 + 1)
        throw error(errc::truncated, "model file too short for declared dimensions");

    EnrollmentModel model;
    model.n = static_cast<std::size_t>(n);
    model.k = static_cast<std::size_t>(k);
    model.m_feat = static_cast<std::size_t>(m_feat);
    model.mean.resize(model.n);
    for (double& v : model.mean) v = reader.next_double();
    model.eigen_ecg = Matrix(model.m_feat, model.n);
    for (std::size_t j = 0; j < model.m_feat; ++j)
        for (std::size_t s = 0; s < model.n; ++s) model.eigen_ecg(j, s) = reader.next_double();
    model.gallery = Matrix(model.k, model.m_feat);
    model.subject_ids.resize(model.k);
    for (std::size_t i = 0; i < model.k; ++i) {
        const long id = reader.next_integer();
        if (id < 0) throw error(errc::parse_error, "model file: negative subject id");
        model.subject_ids[i] = static_cast<int>(id);
        for (std::size_t j = 0; j < model.m_feat; ++j) model.gallery(i, j) = reader.next_double();
    }
    return model;
}

inline void save_model(const EnrollmentModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error(errc::io_error, "cannot open model file for writing: " + path.string());
    const std::string text = model_to_string(model);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw error(errc::io_error, "failed writing model file " + path.string());
}

inline EnrollmentModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(errc::io_error, "cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_string(buf.str());
}

}  // namespace ecgsec

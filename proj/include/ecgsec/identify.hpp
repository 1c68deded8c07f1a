#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ecgsec/ecg_data.hpp"
#include "ecgsec/enroll.hpp"
#include "ecgsec/error.hpp"

namespace ecgsec {

struct MatchResult {
    int subject_id = -1;
    std::size_t gallery_index = 0;
    double distance_sq = 0.0;
    // every gallery index, ascending by squared distance, ties by index
    std::vector<std::pair<std::size_t, double>> ranking;
};

inline std::vector<double> project(const EnrollmentModel& model, const EcgRecord& probe) {
    return project_signal(model.eigen_ecg, model.mean, probe.samples);
}

// Squared Euclidean distance. The square root is dropped on purpose: it is
// monotone on non-negatives, so the nearest match is unchanged and the
// comparison gets cheaper.
inline double distance_sq(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw error(errc::dimension_mismatch, "distance between vectors of length " +
                                                  std::to_string(p.size()) + " and " +
                                                  std::to_string(q.size()));
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double d = p[j] - q[j];
        acc += d * d;
    }
    return acc;
}

inline MatchResult identify(const EnrollmentModel& model, const EcgRecord& probe) {
    if (model.k == 0) throw error(errc::empty_training, "model has no gallery vectors");
    const std::vector<double> p = project(model, probe);

    MatchResult result;
    result.ranking.reserve(model.k);
    for (std::size_t i = 0; i < model.k; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < model.m_feat; ++j) {
            const double d = p[j] - model.gallery(i, j);
            acc += d * d;
        }
        result.ranking.emplace_back(i, acc);
    }
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [](const auto& x, const auto& y) { return x.second < y.second; });
    result.gallery_index = result.ranking.front().first;
    result.distance_sq = result.ranking.front().second;
    result.subject_id = model.subject_ids[result.gallery_index];
    return result;
}

struct EvaluationRow {
    std::size_t probe_index = 0;
    int true_id = 0;
    int predicted_id = 0;
    double distance_sq = 0.0;
};

struct RecognitionReport {
    std::vector<EvaluationRow> rows;
    std::size_t total = 0;
    std::size_t correct = 0;
    double rate = 0.0;
    std::map<std::pair<int, int>, std::size_t> confusion;  // (true_id, predicted_id) -> count
};

// Closed-set evaluation over a test set. Probes are independent, so the loop
// may be split across threads; rows are merged back in probe order and the
// counts are plain sums, so the report does not depend on the thread count.
inline RecognitionReport evaluate(const EnrollmentModel& model, std::span<const EcgRecord> test,
                                  unsigned threads = 1) {
    if (test.empty()) throw error(errc::empty_test, "no test records");

    RecognitionReport report;
    report.rows.resize(test.size());

    const auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const MatchResult match = identify(model, test[i]);
            report.rows[i] = {i, test[i].subject_id, match.subject_id, match.distance_sq};
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(test.size())));
    if (threads == 1) {
        run_range(0, test.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (test.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(test.size(), begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    report.total = report.rows.size();
    for (const EvaluationRow& row : report.rows) {
        if (row.true_id == row.predicted_id) ++report.correct;
        ++report.confusion[{row.true_id, row.predicted_id}];
    }
    report.rate = static_cast<double>(report.correct) / static_cast<double>(report.total);
    return report;
}

inline void write_report_csv(const RecognitionReport& report, std::ostream& out) {
    out << "probe_index,true_id,predicted_id,distance_sq\n";
    char buf[32];
    for (const EvaluationRow& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", row.distance_sq);
        out << row.probe_index << ',' << row.true_id << ',' << row.predicted_id << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", report.rate);
    out << "recognition_rate," << buf << '\n';
}

}  // namespace ecgsec

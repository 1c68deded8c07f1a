#include "ecgsec/identify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace ecgsec;

namespace {

errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an ecgsec::error";
    return errc::io_error;
}

// A model assembled by hand, for tests that need exact gallery control.
EnrollmentModel manual_model(std::size_t n, const Matrix& eigen_ecg, const Matrix& gallery,
                             std::vector<int> ids) {
    EnrollmentModel m;
    m.n = n;
    m.k = gallery.rows();
    m.m_feat = eigen_ecg.rows();
    m.mean.assign(n, 0.0);
    m.eigen_ecg = eigen_ecg;
    m.gallery = gallery;
    m.subject_ids = std::move(ids);
    return m;
}

std::vector<EcgRecord> random_training(std::mt19937_64& rng, int subjects, int per_subject, std::size_t n) {
    std::vector<EcgRecord> out;
    for (int id = 0; id < subjects; ++id)
        for (int r = 0; r < per_subject; ++r) out.push_back(testutil::random_record(rng, id, n));
    return out;
}

}  // namespace

TEST(Project, MeanProbeProjectsToZero) {
    std::mt19937_64 rng(31);
    const auto training = random_training(rng, 3, 2, 40);
    const EnrollmentModel model = enroll(training, 1.0);
    EcgRecord probe;
    probe.samples.resize(model.n);
    for (std::size_t s = 0; s < model.n; ++s) probe.samples[s] = static_cast<float>(model.mean[s]);
    // float narrowing makes this approximate; with integer-valued data it is exact
    for (double v : project(model, probe)) EXPECT_NEAR(v, 0.0, 1e-3);
}

TEST(Project, UnitBasisRowPicksOneComponent) {
    Matrix e(1, 4);
    e(0, 2) = 1.0;
    EnrollmentModel model = manual_model(4, e, Matrix(1, 1), {0});
    model.mean = {1.0, 1.0, 1.0, 1.0};
    EcgRecord probe;
    probe.samples = {5.0f, 6.0f, 7.0f, 8.0f};
    const auto p = project(model, probe);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0], 6.0);  // probe[2] - mean[2]
}

TEST(Project, MatchesNaiveLoopOracle) {
    std::mt19937_64 rng(32);
    const auto training = random_training(rng, 4, 2, 30);
    const EnrollmentModel model = enroll(training, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const EcgRecord probe = testutil::random_record(rng, 0, model.n);
        const auto p = project(model, probe);
        for (std::size_t j = 0; j < model.m_feat; ++j) {
            double expect = 0.0;
            for (std::size_t s = 0; s < model.n; ++s)
                expect += model.eigen_ecg(j, s) * (static_cast<double>(probe.samples[s]) - model.mean[s]);
            EXPECT_NEAR(p[j], expect, 1e-9 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST(Project, DimensionMismatch) {
    std::mt19937_64 rng(33);
    const EnrollmentModel model = enroll(random_training(rng, 2, 1, 20), 1.0);
    const EcgRecord probe = testutil::random_record(rng, 0, 21);
    EXPECT_EQ(code_of([&] { project(model, probe); }), errc::dimension_mismatch);
}

TEST(DistanceSq, Examples) {
    const std::vector<double> zero{0.0, 0.0};
    const std::vector<double> p{3.0, 4.0};
    EXPECT_EQ(distance_sq(p, p), 0.0);
    EXPECT_EQ(distance_sq(zero, p), 25.0);  // 3-4-5 triangle, squared
    const std::vector<double> q{1.0, 2.0, 3.0};
    EXPECT_EQ(code_of([&] { distance_sq(p, q); }), errc::dimension_mismatch);
}

TEST(DistanceSq, MatchesDirectSummation) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng() % 64;
        std::vector<double> p(m), q(m);
        for (std::size_t j = 0; j < m; ++j) {
            p[j] = dist(rng);
            q[j] = dist(rng);
        }
        double expect = 0.0;
        for (std::size_t j = 0; j < m; ++j) expect += (p[j] - q[j]) * (p[j] - q[j]);
        EXPECT_NEAR(distance_sq(p, q), expect, 1e-12 * std::max(1.0, expect));
    }
}

TEST(Identify, SelfMatchReturnsOwnIndex) {
    std::mt19937_64 rng(35);
    const auto training = random_training(rng, 4, 2, 50);
    const EnrollmentModel model = enroll(training, 1.0);
    for (std::size_t i = 0; i < training.size(); ++i) {
        const MatchResult match = identify(model, training[i]);
        EXPECT_EQ(match.gallery_index, i);
        EXPECT_LE(match.distance_sq, 1e-9);
    }
}

TEST(Identify, TieBreaksToLowestGalleryIndex) {
    // gallery rows 2 and 5 are identical; the probe projects between them
    Matrix e(1, 2);
    e(0, 0) = 1.0;
    Matrix gallery(6, 1);
    for (std::size_t i = 0; i < 6; ++i) gallery(i, 0) = static_cast<double>(i) * 10.0;
    gallery(2, 0) = 3.0;
    gallery(5, 0) = 3.0;
    const EnrollmentModel model = manual_model(2, e, gallery, {0, 1, 2, 3, 4, 5});
    EcgRecord probe;
    probe.samples = {3.0f, 0.0f};
    const MatchResult match = identify(model, probe);
    EXPECT_EQ(match.gallery_index, 2u);
    EXPECT_EQ(match.subject_id, 2);
    EXPECT_EQ(match.distance_sq, 0.0);
}

TEST(Identify, RankingIsSortedPermutation) {
    std::mt19937_64 rng(36);
    const auto training = random_training(rng, 6, 2, 40);
    const EnrollmentModel model = enroll(training, 1.0);
    const MatchResult match = identify(model, testutil::random_record(rng, 0, 40));
    ASSERT_EQ(match.ranking.size(), model.k);
    std::vector<bool> seen(model.k, false);
    double prev = -1.0;
    for (const auto& [index, dist] : match.ranking) {
        EXPECT_FALSE(seen[index]);
        seen[index] = true;
        EXPECT_GE(dist, prev);
        prev = dist;
    }
    EXPECT_EQ(match.ranking.front().first, match.gallery_index);
    EXPECT_EQ(match.ranking.front().second, match.distance_sq);
}

TEST(Identify, SyntheticClustersAlwaysResolve) {
    std::mt19937_64 rng(37);
    const std::size_t n = 60;
    std::vector<EcgRecord> templates;
    for (int id = 0; id < 3; ++id) templates.push_back(testutil::random_record(rng, id, n, 100.0));

    // within-subject noise is 1% of the template separation scale
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<EcgRecord> training;
    for (const auto& t : templates)
        for (int r = 0; r < 2; ++r) {
            EcgRecord rec = t;
            for (auto& s : rec.samples) s += static_cast<float>(noise(rng));
            training.push_back(rec);
        }
    const EnrollmentModel model = enroll(training, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int id = static_cast<int>(rng() % 3);
        EcgRecord probe = templates[static_cast<std::size_t>(id)];
        for (auto& s : probe.samples) s += static_cast<float>(noise(rng));
        EXPECT_EQ(identify(model, probe).subject_id, id);
    }
}

TEST(Identify, SqrtEliminationKeepsTheArgmin) {
    std::mt19937_64 rng(38);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng() % 12;
        const std::size_t m = 1 + rng() % 6;
        std::vector<std::vector<double>> gallery(k, std::vector<double>(m));
        std::vector<double> probe(m);
        for (auto& v : probe) v = dist(rng);
        for (auto& row : gallery)
            for (auto& v : row) v = dist(rng);

        std::size_t best_sq = 0, best_true = 0;
        double min_sq = std::numeric_limits<double>::infinity();
        double min_true = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            const double dsq = distance_sq(probe, gallery[i]);
            if (dsq < min_sq) {
                min_sq = dsq;
                best_sq = i;
            }
            const double dtrue = std::sqrt(dsq);
            if (dtrue < min_true) {
                min_true = dtrue;
                best_true = i;
            }
        }
        EXPECT_EQ(best_sq, best_true);
    }
}

TEST(Identify, TranslationInvariance) {
    // shifting probe and mean by the same offset leaves the projection alone
    std::mt19937_64 rng(39);
    std::vector<EcgRecord> training;
    for (int id = 0; id < 3; ++id) {
        EcgRecord r;
        r.subject_id = id;
        r.samples.resize(32);
        for (auto& s : r.samples) s = static_cast<float>(static_cast<int>(rng() % 200) - 100);
        training.push_back(r);
    }
    EnrollmentModel model = enroll(training, 1.0);
    EcgRecord probe = training[1];

    const auto p_before = project(model, probe);
    const float offset = 16.0f;  // integer-valued, so the float addition is exact
    EnrollmentModel shifted = model;
    for (double& m : shifted.mean) m += offset;
    for (auto& s : probe.samples) s += offset;
    const auto p_after = project(shifted, probe);
    for (std::size_t j = 0; j < p_before.size(); ++j) EXPECT_NEAR(p_after[j], p_before[j], 1e-9);
}

TEST(Evaluate, TrainingSetScoresPerfectly) {
    std::mt19937_64 rng(40);
    const auto training = random_training(rng, 5, 3, 50);
    const EnrollmentModel model = enroll(training, 1.0);
    const RecognitionReport report = evaluate(model, training);
    EXPECT_EQ(report.total, training.size());
    EXPECT_EQ(report.correct, training.size());
    EXPECT_EQ(report.rate, 1.0);
    for (const auto& [pair, count] : report.confusion) EXPECT_EQ(pair.first, pair.second);
}

TEST(Evaluate, EmptyTestSetRejected) {
    std::mt19937_64 rng(41);
    const EnrollmentModel model = enroll(random_training(rng, 2, 1, 20), 1.0);
    EXPECT_EQ(code_of([&] { evaluate(model, {}); }), errc::empty_test);
}

TEST(Evaluate, ThreadCountDoesNotChangeTheReport) {
    std::mt19937_64 rng(42);
    const auto training = random_training(rng, 6, 2, 40);
    const EnrollmentModel model = enroll(training, 1.0);
    std::vector<EcgRecord> probes;
    for (int t = 0; t < 30; ++t) {
        EcgRecord p = training[rng() % training.size()];
        for (auto& s : p.samples) s += 0.25f;
        probes.push_back(p);
    }
    const RecognitionReport serial = evaluate(model, probes, 1);
    const RecognitionReport parallel = evaluate(model, probes, 4);
    EXPECT_EQ(serial.rate, parallel.rate);
    ASSERT_EQ(serial.rows.size(), parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        EXPECT_EQ(serial.rows[i].predicted_id, parallel.rows[i].predicted_id);
        EXPECT_EQ(serial.rows[i].distance_sq, parallel.rows[i].distance_sq);
    }
}

TEST(Evaluate, CsvReportShape) {
    std::mt19937_64 rng(43);
    const auto training = random_training(rng, 2, 2, 20);
    const EnrollmentModel model = enroll(training, 1.0);
    const RecognitionReport report = evaluate(model, training);

    std::ostringstream out;
    write_report_csv(report, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "probe_index,true_id,predicted_id,distance_sq");
    std::size_t rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        last = line;
        ++rows;
    }
    EXPECT_EQ(rows, report.rows.size() + 1);  // data rows plus the summary line
    EXPECT_EQ(last, "recognition_rate,1");
}

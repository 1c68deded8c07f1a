#include "ecgsec/ecg_data.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <functional>
#include <random>
#include <string>

#include "test_util.hpp"

using namespace ecgsec;

namespace {

std::string lines_of(const std::string& line, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) out += line + "\n";
    return out;
}

errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an ecgsec::error";
    return errc::io_error;
}

}  // namespace

TEST(LoadRecord, ParsesAllZeros) {
    testutil::TempDir dir;
    testutil::write_text(dir.file("r.txt"), lines_of("0.0", 300));
    const EcgRecord r = load_record(dir.file("r.txt"), 7, 300);
    EXPECT_EQ(r.subject_id, 7);
    ASSERT_EQ(r.samples.size(), 300u);
    for (float s : r.samples) EXPECT_EQ(s, 0.0f);
}

TEST(LoadRecord, PreservesSampleOrder) {
    testutil::TempDir dir;
    std::string text;
    for (int i = 0; i < 300; ++i) text += std::to_string(i) + "\n";
    testutil::write_text(dir.file("r.txt"), text);
    const EcgRecord r = load_record(dir.file("r.txt"), 0, 300);
    for (int i = 0; i < 300; ++i) EXPECT_EQ(r.samples[static_cast<std::size_t>(i)], static_cast<float>(i));
}

TEST(LoadRecord, MissingTrailingNewlineIsFine) {
    testutil::TempDir dir;
    testutil::write_text(dir.file("r.txt"), "1.5\n2.5\n3.5");
    EXPECT_EQ(load_record(dir.file("r.txt"), 0, 3).samples[2], 3.5f);
}

TEST(LoadRecord, WrongLineCount) {
    testutil::TempDir dir;
    testutil::write_text(dir.file("short.txt"), lines_of("0.0", 299));
    testutil::write_text(dir.file("long.txt"), lines_of("0.0", 301));
    EXPECT_EQ(code_of([&] { load_record(dir.file("short.txt"), 0, 300); }), errc::wrong_length);
    EXPECT_EQ(code_of([&] { load_record(dir.file("long.txt"), 0, 300); }), errc::wrong_length);
}

TEST(LoadRecord, ReportsParseErrorWithLineNumber) {
    testutil::TempDir dir;
    std::string text = lines_of("1.0", 4) + "abc\n" + lines_of("1.0", 295);
    testutil::write_text(dir.file("r.txt"), text);
    try {
        load_record(dir.file("r.txt"), 0, 300);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::parse_error);
        EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos);
    }
}

TEST(LoadRecord, RejectsNonFiniteValues) {
    testutil::TempDir dir;
    for (const char* bad : {"inf", "nan", "1e40", "1e400"}) {
        testutil::write_text(dir.file("r.txt"), std::string(bad) + "\n1.0\n");
        EXPECT_EQ(code_of([&] { load_record(dir.file("r.txt"), 0, 2); }), errc::non_finite) << bad;
    }
}

TEST(LoadRecord, MissingFile) {
    EXPECT_EQ(code_of([] { load_record("/nonexistent/path.txt", 0, 300); }), errc::io_error);
}

TEST(Manifest, LoadsAndResolvesRelativePaths) {
    testutil::TempDir dir;
    std::filesystem::create_directories(dir.file("data"));
    testutil::write_text(dir.file("data/a.txt"), lines_of("1.0", 4));
    testutil::write_text(dir.file("data/b.txt"), lines_of("2.0", 4));
    testutil::write_text(dir.file("data/a_test.txt"), lines_of("1.1", 4));
    testutil::write_text(dir.file("data/manifest.csv"),
                         "path,subject_id,split\n"
                         "a.txt,1,TRAIN\n"
                         "b.txt,2,TRAIN\n"
                         "a_test.txt,1,TEST\n");
    const Manifest manifest = load_manifest(dir.file("data/manifest.csv"));
    ASSERT_EQ(manifest.entries.size(), 3u);
    EXPECT_EQ(manifest.entries[0].path, dir.file("data/a.txt"));
    EXPECT_EQ(manifest.entries[2].split, Split::kTest);

    const Dataset dataset = load_dataset(manifest, 4);
    EXPECT_EQ(dataset.train.size(), 2u);
    EXPECT_EQ(dataset.test.size(), 1u);
    EXPECT_EQ(dataset.test[0].subject_id, 1);
}

TEST(Manifest, RejectsBadHeaderAndRows) {
    testutil::TempDir dir;
    testutil::write_text(dir.file("h.csv"), "file,id,part\n");
    EXPECT_EQ(code_of([&] { load_manifest(dir.file("h.csv")); }), errc::parse_error);

    testutil::write_text(dir.file("s.csv"), "path,subject_id,split\na.txt,1,VALIDATE\n");
    EXPECT_EQ(code_of([&] { load_manifest(dir.file("s.csv")); }), errc::parse_error);

    testutil::write_text(dir.file("n.csv"), "path,subject_id,split\na.txt,-3,TRAIN\n");
    EXPECT_EQ(code_of([&] { load_manifest(dir.file("n.csv")); }), errc::parse_error);

    testutil::write_text(dir.file("d.csv"), "path,subject_id,split\na.txt,1,TRAIN\na.txt,2,TRAIN\n");
    EXPECT_EQ(code_of([&] { load_manifest(dir.file("d.csv")); }), errc::parse_error);

    testutil::write_text(dir.file("f.csv"), "path,subject_id,split\na.txt,1\n");
    EXPECT_EQ(code_of([&] { load_manifest(dir.file("f.csv")); }), errc::parse_error);
}

TEST(Dataset, TwoSubjectsOneTrainOneTestEach) {
    testutil::TempDir dir;
    testutil::write_text(dir.file("a.txt"), lines_of("1.0", 4));
    testutil::write_text(dir.file("b.txt"), lines_of("2.0", 4));
    testutil::write_text(dir.file("at.txt"), lines_of("1.1", 4));
    testutil::write_text(dir.file("bt.txt"), lines_of("2.1", 4));
    testutil::write_text(dir.file("m.csv"),
                         "path,subject_id,split\n"
                         "a.txt,1,TRAIN\n"
                         "b.txt,2,TRAIN\n"
                         "at.txt,1,TEST\n"
                         "bt.txt,2,TEST\n");
    const Dataset dataset = load_dataset(load_manifest(dir.file("m.csv")), 4);
    EXPECT_EQ(dataset.train.size() + dataset.test.size(), 4u);
    EXPECT_EQ(dataset.train.size(), 2u);
    EXPECT_EQ(dataset.test.size(), 2u);
}

TEST(Dataset, TestOnlySubjectIsOpenSet) {
    testutil::TempDir dir;
    testutil::write_text(dir.file("a.txt"), lines_of("1.0", 4));
    testutil::write_text(dir.file("b.txt"), lines_of("2.0", 4));
    testutil::write_text(dir.file("c.txt"), lines_of("3.0", 4));
    testutil::write_text(dir.file("m.csv"),
                         "path,subject_id,split\n"
                         "a.txt,1,TRAIN\n"
                         "b.txt,2,TRAIN\n"
                         "c.txt,9,TEST\n");
    EXPECT_EQ(code_of([&] { load_dataset(load_manifest(dir.file("m.csv")), 4); }), errc::open_set_subject);
}

TEST(Dataset, EmptyManifestHasTooFewTrainingRecords) {
    testutil::TempDir dir;
    testutil::write_text(dir.file("m.csv"), "path,subject_id,split\n");
    EXPECT_EQ(code_of([&] { load_dataset(load_manifest(dir.file("m.csv")), 4); }),
              errc::insufficient_training);
}

TEST(Serialize, ThreeHundredSamplesIs1200Bytes) {
    EcgRecord r;
    r.samples.assign(300, 0.0f);
    const auto bytes = serialize_record(r);
    EXPECT_EQ(bytes.size(), 1200u);
    for (std::uint8_t b : bytes) EXPECT_EQ(b, 0u);
}

TEST(Serialize, LittleEndianLayout) {
    EcgRecord r;
    r.samples = {1.0f};  // 0x3f800000
    const auto bytes = serialize_record(r);
    ASSERT_EQ(bytes.size(), 4u);
    EXPECT_EQ(testutil::to_hex(bytes), "0000803f");
}

TEST(Serialize, RoundTripIsBitExact) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<float> dist(-1e6f, 1e6f);
    for (int trial = 0; trial < 100; ++trial) {
        EcgRecord r;
        r.samples.resize(1 + rng() % 512);
        for (auto& s : r.samples) s = dist(rng);
        const EcgRecord back = deserialize_record(serialize_record(r));
        ASSERT_EQ(back.samples.size(), r.samples.size());
        for (std::size_t i = 0; i < r.samples.size(); ++i)
            EXPECT_EQ(std::bit_cast<std::uint32_t>(back.samples[i]),
                      std::bit_cast<std::uint32_t>(r.samples[i]));
    }
}

TEST(Serialize, DeserializeRejectsBadInput) {
    const std::vector<std::uint8_t> odd(1201, 0);
    EXPECT_EQ(code_of([&] { deserialize_record(odd); }), errc::wrong_length);

    EcgRecord r;
    r.samples = {std::bit_cast<float>(0x7f800000u)};  // +inf, bypassing the loader
    const auto bytes = serialize_record(r);
    EXPECT_EQ(code_of([&] { deserialize_record(bytes); }), errc::non_finite);
}

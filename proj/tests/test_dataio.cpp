#include <doctest.h>

#include <filesystem>

#include "cosparse/dataio.hpp"
#include "cosparse/errors.hpp"
#include "cosparse/linalg.hpp"

using namespace cosparse;

namespace {

EcgRecording ramp_recording(std::size_t rows, std::size_t channels, double rate = 360.0) {
    EcgRecording rec;
    rec.sample_rate = rate;
    rec.channels = channels;
    rec.subject_id = "100";
    if (rows) {
        rec.samples = DenseMatrix(rows, channels);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < channels; ++c) rec.samples(r, c) = static_cast<double>(r) * 0.1 - 0.3 * c;
    }
    return rec;
}

}  // namespace

TEST_CASE("csv round trip") {
    EcgRecording rec;
    rec.sample_rate = 360.0;
    rec.channels = 2;
    rec.subject_id = "mitdb-100";
    rec.samples = DenseMatrix{{-0.145, -0.065}, {0.1 + 0.2, 1e-300}, {-3.25e7, 0.0}, {1.0 / 3.0, 2.0 / 3.0}};
    const auto text = format_csv(rec);
    CHECK(text.rfind("# sample_rate=360\n# subject=mitdb-100\n", 0) == 0);
    const auto back = parse_csv(text);
    CHECK(back.sample_rate == 360.0);
    CHECK(back.subject_id == "mitdb-100");
    CHECK(back.channels == 2);
    CHECK(back.samples == rec.samples);
    CHECK(format_csv(back) == text);

    const auto path = std::filesystem::temp_directory_path() / "cosparse_test_roundtrip.csv";
    save_csv(rec, path);
    CHECK(load_csv(path).samples == rec.samples);
    std::filesystem::remove(path);
}

TEST_CASE("csv parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_csv("# subject=1\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(""), ParseError);
    try {
        parse_csv("# sample_rate=360\n# subject=a\n1,2\n3,x\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    try {
        parse_csv("# sample_rate=360\n# subject=a\n1,2\n3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_csv("# sample_rate=-1\n# subject=a\n1\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("# sample_rate=360\n# subject=a\n1,nan\n"), ParseError);
    CHECK_THROWS_AS(load_csv("/nonexistent/cosparse.csv"), Error);
    CHECK(parse_csv("# sample_rate=360\n# subject=a\n").total_samples() == 0);
}

TEST_CASE("segment") {
    SUBCASE("721 rows yield one 720-sample window") {
        const auto segs = segment(ramp_recording(721, 2), 2.0);
        REQUIRE(segs.size() == 1);
        CHECK(segs[0].n_signal() == 720);
        CHECK(segs[0].channels() == 2);
    }
    SUBCASE("82 seconds at 360 Hz give 41 windows") {
        CHECK(segment(ramp_recording(82 * 360, 2), 2.0).size() == 41);
    }
    SUBCASE("empty recording") { CHECK(segment(ramp_recording(0, 2), 2.0).empty()); }
    SUBCASE("windows are disjoint, ordered and cover floor(T/2)*2 seconds") {
        const auto rec = ramp_recording(5 * 360 + 17, 1);
        const auto segs = segment(rec, 2.0);
        REQUIRE(segs.size() == 2);
        std::size_t next = 0;
        for (std::size_t w = 0; w < segs.size(); ++w) {
            CHECK(segs[w].window_index == w);
            for (std::size_t r = 0; r < 720; ++r) CHECK(segs[w].data(r, 0) == rec.samples(next + r, 0));
            next += 720;
        }
        CHECK(next == 4 * 360);
    }
    SUBCASE("non-integer window") { CHECK_THROWS_AS(segment(ramp_recording(100, 1, 250.5), 1.0), ConfigError); }
    SUBCASE("concatenate inverts segment on whole windows") {
        const auto rec = ramp_recording(3 * 720, 2);
        const auto again = concatenate(segment(rec, 2.0), rec.sample_rate);
        CHECK(again.samples == rec.samples);
        CHECK(again.channels == 2);
    }
}

TEST_CASE("synth_cosparse") {
    const auto omega = second_order_diff(60);
    SUBCASE("maximal co-support is affine") {
        const auto s = synth_cosparse(60, 58, 1, true, 4);
        const auto ox = linalg::matmul(omega.matrix, s.segment.data);
        for (std::size_t i = 0; i < 58; ++i) CHECK(ox(i, 0) == 0.0);
    }
    SUBCASE("declared co-support is exactly zero, the rest is not") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto s = synth_cosparse(60, 50, 2, false, seed);
            const auto ox = linalg::matmul(omega.matrix, s.segment.data);
            for (std::size_t c = 0; c < 2; ++c) {
                CHECK(s.cosupports[c].size() == 50);
                std::vector<bool> in(60, false);
                for (auto i : s.cosupports[c]) in[i] = true;
                std::size_t zeros = 0;
                for (std::size_t i = 0; i < 58; ++i) {
                    if (in[i]) CHECK(ox(i, c) == 0.0);
                    else CHECK(ox(i, c) != 0.0);
                    zeros += std::abs(ox(i, c)) < 1e-10;
                }
                CHECK(zeros >= 50);
            }
        }
    }
    SUBCASE("shared co-support") {
        const auto s = synth_cosparse(80, 70, 2, true, 9);
        CHECK(s.cosupports[0] == s.cosupports[1]);
        const auto ox = linalg::matmul(second_order_diff(80).matrix, s.segment.data);
        for (std::size_t i = 0; i < 78; ++i) CHECK((ox(i, 0) == 0.0) == (ox(i, 1) == 0.0));
        CHECK_FALSE(s.segment.data.col(0) == s.segment.data.col(1));
    }
    SUBCASE("determinism and errors") {
        CHECK(synth_cosparse(40, 30, 2, true, 1).segment.data == synth_cosparse(40, 30, 2, true, 1).segment.data);
        CHECK_THROWS_AS(synth_cosparse(40, 39, 1, true, 1), ConfigError);
    }
}

TEST_CASE("synth_sparse") {
    const auto psi = daubechies_dictionary(64, 4, 3);
    CHECK(linalg::frobenius_norm(synth_sparse(psi, 0, 1, true, 0).segment.data) == 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = synth_sparse(psi, 6, 2, seed % 2 == 0, seed);
        const auto coeffs = linalg::matmul_at(psi.matrix, s.segment.data);
        for (std::size_t c = 0; c < 2; ++c) {
            std::vector<std::size_t> found;
            for (std::size_t j = 0; j < 64; ++j)
                if (std::abs(coeffs(j, c)) > 1e-10) found.push_back(j);
            CHECK(found == s.supports[c]);
        }
        if (seed % 2 == 0) CHECK(s.supports[0] == s.supports[1]);
    }
    CHECK_THROWS_AS(synth_sparse(psi, 65, 1, true, 0), ConfigError);
}

// Analytic distortion model, PSNR conversion, Bjontegaard deltas, aggregate
// stream statistics, and rate-distortion CSV I/O.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "btbd/analysis.hpp"
#include "btbd/common.hpp"
#include "btbd/frame.hpp"

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// The residual model: zero with probability p, otherwise a signed magnitude
// with P(k) proportional to theta^k, theta = (1-p)/(1+p).
double simulated_quantiser_mse(double p, int q, uint64_t samples, uint32_t seed) {
    std::mt19937_64 rng(seed);
    const double theta = (1.0 - p) / (1.0 + p);
    std::bernoulli_distribution is_zero(p);
    std::bernoulli_distribution negative(0.5);
    std::geometric_distribution<int> tail(1.0 - theta);  // {0,1,...}, shift by 1

    double acc = 0.0;
    for (uint64_t i = 0; i < samples; ++i) {
        int residual = 0;
        if (!is_zero(rng)) {
            const int magnitude = tail(rng) + 1;
            residual = negative(rng) ? -magnitude : magnitude;
        }
        const int err = residual - q * btbd::round_div(residual, q);
        acc += static_cast<double>(err) * err;
    }
    return acc / static_cast<double>(samples);
}

btbd::Sequence padded_pair_member(uint8_t fill, int count) {
    btbd::Sequence s;
    for (int i = 0; i < count; ++i) s.frames.emplace_back(128, 128, fill);
    s.original_width = 100;
    s.original_height = 90;
    return s;
}

}  // namespace

TEST_CASE("quantiser distortion model matches pinned closed-form values") {
    CHECK(btbd::tsg_mse(0.8, 15) == doctest::Approx(0.281249).epsilon(5e-5));
    CHECK(btbd::tsg_mse(0.9, 15) == doctest::Approx(0.117284).epsilon(5e-5));

    CHECK(btbd::psnr_from_mse(btbd::tsg_mse(0.8, 15)) == doctest::Approx(53.6399).epsilon(1e-5));
    CHECK(btbd::psnr_from_mse(btbd::tsg_mse(0.9, 15)) == doctest::Approx(57.4384).epsilon(1e-5));
    CHECK(btbd::psnr_from_mse(1.0) == doctest::Approx(48.130809).epsilon(1e-6));
    CHECK(btbd::psnr_from_mse(49.0) == doctest::Approx(31.228848).epsilon(1e-6));
    CHECK(std::isinf(btbd::psnr_from_mse(0.0)));

    SUBCASE("domain validation") {
        CHECK_THROWS_WITH_AS(btbd::tsg_mse(0.0, 15), "zero proportion must lie in (0,1)",
                             btbd::InputError);
        CHECK_THROWS_WITH_AS(btbd::tsg_mse(1.0, 15), "zero proportion must lie in (0,1)",
                             btbd::InputError);
        CHECK_THROWS_WITH_AS(btbd::tsg_mse(-0.2, 15), "zero proportion must lie in (0,1)",
                             btbd::InputError);
        CHECK_THROWS_WITH_AS(btbd::tsg_mse(0.8, 2), "step must be odd and at least 3",
                             btbd::InputError);
        CHECK_THROWS_WITH_AS(btbd::tsg_mse(0.8, 1), "step must be odd and at least 3",
                             btbd::InputError);
        CHECK_THROWS_WITH_AS(btbd::tsg_mse(0.8, 16), "step must be odd and at least 3",
                             btbd::InputError);
    }

    SUBCASE("monotone in zero proportion and in step size") {
        CHECK(btbd::tsg_mse(0.5, 15) > btbd::tsg_mse(0.8, 15));
        CHECK(btbd::tsg_mse(0.8, 15) > btbd::tsg_mse(0.9, 15));
        CHECK(btbd::tsg_mse(0.9, 15) > btbd::tsg_mse(0.99, 15));
        CHECK(btbd::tsg_mse(0.8, 3) < btbd::tsg_mse(0.8, 7));
        CHECK(btbd::tsg_mse(0.8, 7) < btbd::tsg_mse(0.8, 15));
    }
}

TEST_CASE("quantiser distortion model agrees with direct simulation") {
    for (double p : {0.8, 0.9}) {
        CAPTURE(p);
        const double analytic = btbd::tsg_mse(p, 15);
        const double simulated = simulated_quantiser_mse(p, 15, 2'000'000, 1337);
        CHECK(std::abs(simulated - analytic) <= 0.05 * analytic);
    }
}

TEST_CASE("rate-distortion deltas behave like Bjontegaard metrics") {
    // PSNR linear in log-rate: a cubic fit reproduces it exactly.
    auto curve = [](double psnr_shift, double rate_scale) {
        std::vector<btbd::RdPoint> pts;
        for (double r : {0.5, 1.0, 2.0, 4.0})
            pts.push_back({r * rate_scale, 35.0 + 12.0 * std::log10(r) + psnr_shift});
        return pts;
    };

    SUBCASE("identical curves give zero deltas") {
        const auto bd = btbd::bd_metrics(curve(0, 1), curve(0, 1));
        CHECK(std::abs(bd.bd_psnr_db) < 1e-9);
        CHECK(std::abs(bd.bd_rate_percent) < 1e-9);
    }

    SUBCASE("a one-decibel shift is measured exactly") {
        const auto bd = btbd::bd_metrics(curve(0, 1), curve(1, 1));
        CHECK(bd.bd_psnr_db == doctest::Approx(1.0).epsilon(0.01));
        CHECK(bd.bd_rate_percent < -10.0);
        CHECK(bd.bd_rate_percent > -25.0);
    }

    SUBCASE("halving every bitrate halves the rate delta") {
        const auto bd = btbd::bd_metrics(curve(0, 1), curve(0, 0.5));
        CHECK(bd.bd_rate_percent == doctest::Approx(-50.0).epsilon(0.01));
        CHECK(bd.bd_psnr_db > 3.0);  // same quality from half the bits
    }

    SUBCASE("swapping the curves negates the deltas") {
        const auto ab = btbd::bd_metrics(curve(0, 1), curve(0.7, 0.8));
        const auto ba = btbd::bd_metrics(curve(0.7, 0.8), curve(0, 1));
        CHECK(ab.bd_psnr_db == doctest::Approx(-ba.bd_psnr_db).epsilon(1e-9));
        const double prod =
            (1.0 + ab.bd_rate_percent / 100.0) * (1.0 + ba.bd_rate_percent / 100.0);
        CHECK(prod == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("input validation") {
        auto three = curve(0, 1);
        three.pop_back();
        CHECK_THROWS_WITH_AS(btbd::bd_metrics(three, curve(0, 1)),
                             "each curve needs at least four points", btbd::InputError);

        auto zero_rate = curve(0, 1);
        zero_rate[0].bpp = 0.0;
        CHECK_THROWS_WITH_AS(btbd::bd_metrics(zero_rate, curve(0, 1)),
                             "bitrates must be positive", btbd::InputError);

        CHECK_THROWS_WITH_AS(btbd::bd_metrics(curve(0, 1), curve(0, 100.0)),
                             "curves do not overlap in rate", btbd::InputError);

        CHECK_THROWS_WITH_AS(btbd::bd_metrics(curve(0, 1), curve(200.0, 1)),
                             "curves do not overlap in quality", btbd::InputError);
    }
}

TEST_CASE("aggregate statistics reduce bits and errors over the original region") {
    SUBCASE("uncompressed identical pair") {
        const auto a = padded_pair_member(50, 2);
        const uint64_t bits = 8ull * 100 * 90 * 2;
        const auto s = btbd::sequence_stats(a, a, bits);
        CHECK(s.bpp == doctest::Approx(8.0));
        CHECK(s.compression_ratio == doctest::Approx(1.0));
        CHECK(std::isinf(s.psnr));
        CHECK(s.zero_proportion == doctest::Approx(-1.0));
    }

    SUBCASE("pinned bit budget") {
        btbd::Sequence a;
        a.frames.emplace_back(128, 128, 10);
        a.original_width = 100;
        a.original_height = 100;
        const auto s = btbd::sequence_stats(a, a, 1900);
        CHECK(s.bpp == doctest::Approx(0.19));
        CHECK(s.compression_ratio == doctest::Approx(8.0 / 0.19));  // ~42.105
    }

    SUBCASE("zero-rank proportion plumbing") {
        const auto a = padded_pair_member(50, 1);
        CHECK(btbd::sequence_stats(a, a, 100, 30, 40).zero_proportion == doctest::Approx(0.75));
        CHECK(btbd::sequence_stats(a, a, 100, 0, 0).zero_proportion == doctest::Approx(-1.0));
    }

    SUBCASE("distortion is measured inside the original window only") {
        auto a = padded_pair_member(50, 1);
        auto b = padded_pair_member(50, 1);
        // Corrupt padding only: stats must still report a perfect match.
        for (int r = 0; r < 128; ++r)
            for (int c = 100; c < 128; ++c) b.frames[0].at(r, c) = 0;
        CHECK(std::isinf(btbd::sequence_stats(a, b, 100).psnr));

        b.frames[0].at(0, 0) = 57;  // one in-window error of 7
        const auto s = btbd::sequence_stats(a, b, 100);
        const double mse = 49.0 / (100.0 * 90.0);
        CHECK(s.psnr == doctest::Approx(btbd::psnr_from_mse(mse)).epsilon(1e-12));
    }

    SUBCASE("shape validation") {
        const auto a = padded_pair_member(50, 2);
        const auto b = padded_pair_member(50, 1);
        CHECK_THROWS_WITH_AS(btbd::sequence_stats(a, b, 100),
                             "sequences differ in frame count", btbd::InputError);
        auto c = padded_pair_member(50, 2);
        c.original_width = 64;
        CHECK_THROWS_WITH_AS(btbd::sequence_stats(a, c, 100),
                             "sequences differ in dimensions", btbd::InputError);
    }
}

TEST_CASE("rate-distortion CSV files round-trip and reject malformed input") {
    const std::string path = temp_path("btbd_rd_test.csv");

    const std::vector<btbd::RdPoint> pts = {
        {0.131, 51.02}, {0.245, 53.77}, {0.52, 56.5}, {1.25, 60.125}};
    btbd::write_rd_csv(path, pts);
    const auto back = btbd::read_rd_csv(path);
    REQUIRE(back.size() == pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(back[i].bpp == doctest::Approx(pts[i].bpp).epsilon(1e-12));
        CHECK(back[i].psnr == doctest::Approx(pts[i].psnr).epsilon(1e-12));
    }

    SUBCASE("whitespace is tolerated") {
        write_text(path, "bpp,psnr\n 0.5 , 30.25 \n1,40\n");
        const auto v = btbd::read_rd_csv(path);
        REQUIRE(v.size() == 2);
        CHECK(v[0].bpp == doctest::Approx(0.5));
        CHECK(v[0].psnr == doctest::Approx(30.25));
    }

    SUBCASE("bad header") {
        write_text(path, "rate,quality\n1,40\n");
        CHECK_THROWS_WITH_AS(btbd::read_rd_csv(path),
                             (path + ": expected header 'bpp,psnr'").c_str(), btbd::InputError);
    }

    SUBCASE("malformed point reports its line") {
        write_text(path, "bpp,psnr\n1,40\nabc,41\n");
        CHECK_THROWS_WITH_AS(btbd::read_rd_csv(path),
                             (path + ": malformed point at line 3").c_str(), btbd::InputError);
        write_text(path, "bpp,psnr\n1\n");
        CHECK_THROWS_WITH_AS(btbd::read_rd_csv(path),
                             (path + ": malformed point at line 2").c_str(), btbd::InputError);
    }

    SUBCASE("non-positive bitrate reports its line") {
        write_text(path, "bpp,psnr\n0,40\n");
        CHECK_THROWS_WITH_AS(btbd::read_rd_csv(path),
                             (path + ": non-positive bitrate at line 2").c_str(),
                             btbd::InputError);
    }

    SUBCASE("missing file") {
        const std::string missing = temp_path("btbd_rd_missing_file.csv");
        std::filesystem::remove(missing);
        CHECK_THROWS_AS(btbd::read_rd_csv(missing), btbd::InputError);
        CHECK_THROWS_AS(btbd::write_rd_csv("/nonexistent_dir_for_test/x.csv", pts),
                        btbd::InputError);
    }

    std::filesystem::remove(path);
}

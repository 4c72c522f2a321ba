#include <doctest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "gitseg/metrics.hpp"
#include "gitseg/report.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "volumes.hpp"

using namespace gitseg;
using testing::volume_with;

namespace {

MaskVolume empty_volume(std::size_t w = 4, std::size_t h = 4, std::size_t d = 2) {
    return MaskVolume(w, h, d, std::vector<std::uint8_t>(w * h * d, 0), {1, 1, 1});
}

}  // namespace

TEST_CASE("dice examples") {
    const auto a = volume_with(4, 4, 2, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
    const auto b = volume_with(4, 4, 2, {{2, 0, 0}, {3, 0, 0}, {0, 1, 0}, {1, 1, 0}});
    const auto c = volume_with(4, 4, 2, {{0, 3, 1}});
    CHECK(dice(a, a) == 1.0);
    CHECK(dice(a, c) == 0.0);
    CHECK(dice(a, b) == 0.5);
    CHECK(dice(empty_volume(), empty_volume()) == 1.0);
    CHECK(dice(a, empty_volume()) == 0.0);
    CHECK_THROWS_AS(dice(a, empty_volume(4, 4, 3)), ShapeMismatch);
}

TEST_CASE("hausdorff examples") {
    const auto p = volume_with(11, 5, 1, {{0, 0, 0}});
    const auto q = volume_with(11, 5, 1, {{3, 4, 0}});
    const auto r = volume_with(11, 5, 1, {{0, 0, 0}, {10, 0, 0}});
    for (auto hd : {hausdorff_brute, hausdorff_fast}) {
        CHECK(hd(r, r) == 0.0);
        CHECK(hd(p, q) == 5.0);
        CHECK(hd(p, r) == 10.0);
        CHECK(hd(r, p) == 10.0);
        CHECK_THROWS_AS(hd(p, empty_volume(11, 5, 1)), EmptyForeground);
        CHECK_THROWS_AS(hd(empty_volume(11, 5, 1), p), EmptyForeground);
        CHECK_THROWS_AS(hd(p, empty_volume()), ShapeMismatch);
    }
}

TEST_CASE("hausdorff honours spacing") {
    const auto p = volume_with(3, 3, 3, {{0, 0, 0}}, {1.5, 1.5, 3.0});
    const auto q = volume_with(3, 3, 3, {{0, 0, 2}}, {1.5, 1.5, 3.0});
    CHECK(hausdorff_brute(p, q) == 6.0);
    CHECK(hausdorff_fast(p, q) == 6.0);
}

TEST_CASE("hd_score examples") {
    const auto a = volume_with(5, 4, 3, {{1, 1, 1}, {2, 1, 1}});
    CHECK(hd_score(a, a) == 1.0);
    const auto lo = volume_with(5, 4, 3, {{0, 0, 0}});
    const auto hi = volume_with(5, 4, 3, {{4, 3, 2}});
    CHECK(hd_score(lo, hi) == 0.0);
    CHECK(hd_score(a, empty_volume(5, 4, 3)) == 0.0);
    CHECK(hd_score(empty_volume(5, 4, 3), a) == 0.0);
    CHECK(hd_score(empty_volume(5, 4, 3), empty_volume(5, 4, 3)) == 1.0);
    CHECK(volume_diagonal(a) == std::sqrt(16.0 + 9.0 + 4.0));

    const auto one = volume_with(1, 1, 1, {{0, 0, 0}});
    CHECK(volume_diagonal(one) == 0.0);
    CHECK(hd_score(one, one) == 1.0);
}

TEST_CASE("composite") {
    CHECK(composite(1.0, 1.0) == 1.0);
    CHECK(composite(1.0, 0.0) == 0.4);
    CHECK(composite(0.0, 1.0) == 0.6);
    CHECK(composite(0.5, 0.5) == 0.5);
    CHECK(composite(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(composite(1.1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(composite(0.0, -0.1), InvalidArgument);
    CHECK_THROWS_AS(composite(std::nan(""), 0.0), InvalidArgument);

    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double a = i / 20.0;
            const double b = j / 20.0;
            REQUIRE(composite(a, b) <= composite(a, b + 0.05));
            if (i < 20) REQUIRE(composite(a, b) <= composite(a + 0.05, b));
        }
}

TEST_CASE("score_case") {
    testing::Engine rng(5);
    PerClass<MaskVolume> truth{testing::random_volume(rng, 6, 6, 3, 0.3), testing::random_volume(rng, 6, 6, 3, 0.3),
                               empty_volume(6, 6, 3)};
    const auto same = score_case(truth, truth);
    for (const auto& c : same.classes) CHECK(c.composite == 1.0);
    CHECK(same.mean_composite == 1.0);
    CHECK(same.classes[2].dice == 1.0);
    CHECK(!same.classes[2].hausdorff_mm.has_value());
    CHECK(same.classes[0].hausdorff_mm == 0.0);

    PerClass<MaskVolume> pred{truth[0], empty_volume(6, 6, 3), truth[0]};
    const auto r = score_case(pred, truth);
    CHECK(r.classes[1].composite == 0.0);
    CHECK(r.classes[2].composite == 0.0);
    CHECK(r.mean_composite == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    PerClass<MaskVolume> bad{truth[0], truth[1], empty_volume(6, 6, 4)};
    CHECK_THROWS_AS(score_case(bad, truth), ShapeMismatch);
}

TEST_CASE("composite row invariant and mean") {
    testing::Engine rng(6);
    for (int i = 0; i < 30; ++i) {
        PerClass<MaskVolume> a{testing::random_volume(rng, 5, 5, 3, 0.3), testing::random_volume(rng, 5, 5, 3, 0.3),
                               testing::random_volume(rng, 5, 5, 3, 0.3)};
        PerClass<MaskVolume> b{testing::random_volume(rng, 5, 5, 3, 0.3), testing::random_volume(rng, 5, 5, 3, 0.3),
                               testing::random_volume(rng, 5, 5, 3, 0.3)};
        const auto r = score_case(a, b);
        double sum = 0;
        for (const auto& c : r.classes) {
            REQUIRE(std::abs(c.composite - (0.4 * c.dice + 0.6 * c.hd_score)) <= 1e-12);
            sum += c.composite;
        }
        REQUIRE(std::abs(r.mean_composite - sum / 3) <= 1e-15);
    }
}

TEST_CASE("property: oracle agreement, symmetry, triangle inequality") {
    testing::Engine rng(2718);
    for (int i = 0; i < 300; ++i) {
        const auto w = testing::pick(rng, 1, 12);
        const auto h = testing::pick(rng, 1, 12);
        const auto d = testing::pick(rng, 1, 8);
        const auto a = testing::random_volume(rng, w, h, d, testing::real(rng, 0.01, 0.5));
        const auto b = testing::random_volume(rng, w, h, d, testing::real(rng, 0.01, 0.5));
        const auto c = testing::random_volume(rng, w, h, d, testing::real(rng, 0.01, 0.5));

        const double fast = hausdorff_fast(a, b);
        REQUIRE(fast == hausdorff_brute(a, b));
        REQUIRE(fast == std::sqrt(static_cast<double>(testing::brute_squared_hausdorff(a, b))));
        REQUIRE(fast == hausdorff_fast(b, a));
        REQUIRE((fast == 0.0) == (a == b));
        REQUIRE(fast <= hausdorff_fast(a, c) + hausdorff_fast(c, b) + 1e-12);

        const auto [num, den] = testing::dice_fraction(a, b);
        REQUIRE(std::abs(dice(a, b) - static_cast<double>(num) / static_cast<double>(den)) <= 1e-12);
        REQUIRE(dice(a, b) == dice(b, a));
    }
}

TEST_CASE("property: fractional spacing agrees within 1e-9") {
    testing::Engine rng(2719);
    for (int i = 0; i < 100; ++i) {
        const Spacing sp{testing::real(rng, 0.2, 3.0), testing::real(rng, 0.2, 3.0), testing::real(rng, 0.2, 3.0)};
        const auto a = testing::random_volume(rng, 7, 6, 5, 0.1, sp);
        const auto b = testing::random_volume(rng, 7, 6, 5, 0.1, sp);
        const double brute = hausdorff_brute(a, b);
        REQUIRE(std::abs(hausdorff_fast(a, b) - brute) <= 1e-9 * std::max(1.0, brute));
    }
}

TEST_CASE("property: axis flips and quarter turns preserve dice and hausdorff") {
    testing::Engine rng(2720);
    for (int i = 0; i < 100; ++i) {
        const auto a = testing::random_volume(rng, 9, 7, 4, 0.15);
        const auto b = testing::random_volume(rng, 9, 7, 4, 0.15);
        const auto fa = testing::flip_x(a);
        const auto fb = testing::flip_x(b);
        REQUIRE(dice(fa, fb) == dice(a, b));
        REQUIRE(hausdorff_fast(fa, fb) == hausdorff_fast(a, b));
        const auto ta = testing::turn_xy(a);
        const auto tb = testing::turn_xy(b);
        REQUIRE(dice(ta, tb) == dice(a, b));
        REQUIRE(hausdorff_fast(ta, tb) == hausdorff_fast(a, b));
    }
}

TEST_CASE("score report layout and round trip") {
    const auto a = volume_with(3, 3, 1, {{0, 0, 0}});
    const auto b = volume_with(3, 3, 1, {{2, 2, 0}});
    const auto e = MaskVolume(3, 3, 1, std::vector<std::uint8_t>(9, 0), {1, 1, 1});
    std::vector<CaseScore> cases{{"case1_day1", score_case({a, e, a}, {a, e, b})},
                                 {"case2_day3", score_case({a, a, a}, {a, a, a})}};
    std::ostringstream out;
    write_score_report(out, cases, ClassLabels{});
    CHECK(out.str() ==
          "case_id,class,dice,hausdorff_mm,hd_score,composite\n"
          "case1_day1,large_bowel,1,0,1,1\n"
          "case1_day1,small_bowel,1,,1,1\n"
          "case1_day1,stomach,0,2.8284271247461903,0,0\n"
          "case2_day3,large_bowel,1,0,1,1\n"
          "case2_day3,small_bowel,1,0,1,1\n"
          "case2_day3,stomach,1,0,1,1\n"
          "case1_day1,mean,0.6666666666666666,,0.6666666666666666,0.6666666666666666\n"
          "case2_day3,mean,1,,1,1\n"
          "overall,mean,0.8333333333333333,,0.8333333333333333,0.8333333333333333\n");
    CHECK(overall_composite(cases) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(overall_composite({}) == 0.0);

    testing::TempDir dir("report");
    const auto path = (dir.path() / "scores.csv").string();
    write_score_report(path, cases, ClassLabels{});
    const auto rows = read_score_report(path);
    REQUIRE(rows.size() == 9);
    CHECK(rows[2].hausdorff_mm == doctest::Approx(std::sqrt(8.0)));
    CHECK(!rows[1].hausdorff_mm.has_value());
    CHECK(rows.back().case_id == "overall");
    CHECK(rows.back().composite == overall_composite(cases));
}

TEST_CASE("format_real") {
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(0.4) == "0.4");
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

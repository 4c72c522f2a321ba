#include <doctest.h>

#include <cmath>
#include <limits>

#include "generators.hpp"
#include "gitseg/edt.hpp"
#include "oracles.hpp"
#include "volumes.hpp"

using namespace gitseg;
using testing::volume_with;

TEST_CASE("all foreground gives zeros") {
    const MaskVolume full(3, 4, 2, std::vector<std::uint8_t>(24, 1));
    const auto f = edt3d(full);
    CHECK(std::ranges::all_of(f.values(), [](double v) { return v == 0.0; }));
}

TEST_CASE("corner voxel of a 2x2x2 volume") {
    const auto f = edt3d(volume_with(2, 2, 2, {{0, 0, 0}}));
    CHECK(f.at(1, 1, 1) == std::sqrt(3.0));
    CHECK(f.at(0, 0, 0) == 0.0);
    CHECK(f.at(1, 0, 0) == 1.0);
    CHECK(f.at(1, 1, 0) == std::sqrt(2.0));
}

TEST_CASE("empty volume is infinite everywhere") {
    const auto f = edt3d(MaskVolume(3, 3, 3, std::vector<std::uint8_t>(27, 0)));
    CHECK(std::ranges::all_of(f.values(), [](double v) { return std::isinf(v) && v > 0; }));
}

TEST_CASE("spacing scales each axis") {
    const auto f = edt3d(volume_with(3, 3, 3, {{0, 0, 0}}, {1.5, 2.0, 3.0}));
    CHECK(f.at(2, 0, 0) == 3.0);
    CHECK(f.at(0, 2, 0) == 4.0);
    CHECK(f.at(0, 0, 2) == 6.0);
    CHECK(f.at(2, 2, 2) == std::sqrt(9.0 + 16.0 + 36.0));
    CHECK(f.spacing() == Spacing{1.5, 2.0, 3.0});
}

TEST_CASE("degenerate extents") {
    const auto line = edt3d(volume_with(7, 1, 1, {{3, 0, 0}}));
    for (std::size_t x = 0; x < 7; ++x)
        CHECK(line.at(x, 0, 0) == std::abs(static_cast<double>(x) - 3.0));
    const auto column = edt3d(volume_with(1, 1, 5, {{0, 0, 4}}));
    CHECK(column.at(0, 0, 0) == 4.0);
    const auto one = edt3d(volume_with(1, 1, 1, {{0, 0, 0}}));
    CHECK(one.at(0, 0, 0) == 0.0);
}

TEST_CASE("property: exact against the all-pairs oracle") {
    testing::Engine rng(777);
    for (int i = 0; i < 120; ++i) {
        const auto w = testing::pick(rng, 1, 9);
        const auto h = testing::pick(rng, 1, 9);
        const auto d = testing::pick(rng, 1, 9);
        const auto v = testing::random_volume(rng, w, h, d, testing::real(rng, 0.0, 0.4), {1, 1, 1}, i % 7 != 0);
        const auto sq = squared_edt(v);
        const auto oracle = testing::brute_squared_edt(v);
        for (std::size_t k = 0; k < sq.size(); ++k) {
            if (oracle[k] < 0) {
                REQUIRE(std::isinf(sq[k]));
            } else {
                REQUIRE(sq[k] == static_cast<double>(oracle[k]));
            }
        }
        const auto f = edt3d(v);
        for (std::size_t k = 0; k < sq.size(); ++k) REQUIRE(f.values()[k] == std::sqrt(sq[k]));
    }
}

TEST_CASE("property: anisotropic spacing matches brute force") {
    testing::Engine rng(778);
    for (int i = 0; i < 60; ++i) {
        const Spacing sp{testing::real(rng, 0.3, 3.0), testing::real(rng, 0.3, 3.0), testing::real(rng, 0.3, 3.0)};
        const auto v = testing::random_volume(rng, testing::pick(rng, 1, 7), testing::pick(rng, 1, 7),
                                              testing::pick(rng, 1, 7), 0.2, sp);
        const auto f = edt3d(v);
        std::vector<std::array<double, 3>> fg;
        for (std::size_t z = 0; z < v.depth(); ++z)
            for (std::size_t y = 0; y < v.height(); ++y)
                for (std::size_t x = 0; x < v.width(); ++x)
                    if (v.at(x, y, z)) fg.push_back({double(x), double(y), double(z)});
        for (std::size_t z = 0; z < v.depth(); ++z)
            for (std::size_t y = 0; y < v.height(); ++y)
                for (std::size_t x = 0; x < v.width(); ++x) {
                    double best = std::numeric_limits<double>::infinity();
                    for (const auto& p : fg) {
                        const double dx = (p[0] - double(x)) * sp.x;
                        const double dy = (p[1] - double(y)) * sp.y;
                        const double dz = (p[2] - double(z)) * sp.z;
                        best = std::min(best, dx * dx + dy * dy + dz * dz);
                    }
                    REQUIRE(f.at(x, y, z) == doctest::Approx(std::sqrt(best)).epsilon(1e-12));
                }
    }
}

TEST_CASE("property: zero on foreground, Lipschitz per axis") {
    testing::Engine rng(779);
    for (int i = 0; i < 40; ++i) {
        const Spacing sp{testing::real(rng, 0.5, 2.0), testing::real(rng, 0.5, 2.0), testing::real(rng, 0.5, 4.0)};
        const auto v = testing::random_volume(rng, 10, 9, 8, 0.05, sp);
        const auto f = edt3d(v);
        for (std::size_t z = 0; z < 8; ++z)
            for (std::size_t y = 0; y < 9; ++y)
                for (std::size_t x = 0; x < 10; ++x) {
                    const double here = f.at(x, y, z);
                    REQUIRE((here == 0.0) == v.at(x, y, z));
                    if (x + 1 < 10) REQUIRE(std::abs(here - f.at(x + 1, y, z)) <= sp.x * (1 + 1e-12));
                    if (y + 1 < 9) REQUIRE(std::abs(here - f.at(x, y + 1, z)) <= sp.y * (1 + 1e-12));
                    if (z + 1 < 8) REQUIRE(std::abs(here - f.at(x, y, z + 1)) <= sp.z * (1 + 1e-12));
                }
    }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "gitseg/metrics.hpp"
#include "gitseg/preprocess.hpp"

using namespace gitseg;

namespace {

NormalizedImage random_image(testing::Engine& rng, std::size_t w, std::size_t h) {
    std::vector<double> v(w * h);
    for (auto& x : v) x = testing::real(rng, 0.0, 1.0);
    return {w, h, std::move(v)};
}

Sample random_sample(testing::Engine& rng, std::size_t w, std::size_t h, std::uint32_t slice = 1) {
    return Sample(random_image(rng, w, h),
                  {testing::random_mask(rng, w, h), testing::random_mask(rng, w, h),
                   testing::random_mask(rng, w, h)},
                  make_slice_key("case7", 3, slice));
}

// Image whose value is 1 exactly where the mask is set.
Sample indicator_sample(const BinaryMask& mask) {
    std::vector<double> v(mask.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask.bits()[i];
    return Sample(NormalizedImage(mask.width(), mask.height(), std::move(v)), {mask, mask, mask},
                  make_slice_key("c", 1, 1));
}

double max_abs_diff(const NormalizedImage& a, const NormalizedImage& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

bool in_unit_range(const NormalizedImage& img) {
    return std::ranges::all_of(img.values(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

// Every set mask pixel must see image mass from its nearest source pixel.
void check_joint(const Sample& s) {
    for (std::size_t i = 0; i < s.image().size(); ++i)
        if (s.mask(OrganClass::LargeBowel).bits()[i]) REQUIRE(s.image().values()[i] >= 0.25 - 1e-12);
}

}  // namespace

TEST_CASE("normalize_intensity") {
    const auto a = normalize_intensity(SliceImage(2, 1, {0, 65535}));
    CHECK(a.values()[0] == 0.0);
    CHECK(a.values()[1] == 1.0);
    const auto b = normalize_intensity(SliceImage(2, 2, {7, 7, 7, 7}));
    CHECK(std::ranges::all_of(b.values(), [](double v) { return v == 0.0; }));
    const auto c = normalize_intensity(SliceImage(3, 1, {10, 20, 30}));
    CHECK(c.values()[0] == 0.0);
    CHECK(c.values()[1] == 0.5);
    CHECK(c.values()[2] == 1.0);
}

TEST_CASE("resize_image") {
    testing::Engine rng(3);
    const auto src = random_image(rng, 266, 266);
    const auto out = resize_image(src, 320, 384);
    CHECK(out.width() == 320);
    CHECK(out.height() == 384);
    CHECK(in_unit_range(out));

    const NormalizedImage flat(5, 3, std::vector<double>(15, 0.37));
    for (auto [w, h] : {std::pair<std::size_t, std::size_t>{1, 1}, {7, 2}, {40, 41}}) {
        const auto r = resize_image(flat, w, h);
        CHECK(std::ranges::all_of(r.values(), [](double v) { return std::abs(v - 0.37) < 1e-15; }));
    }
    CHECK(max_abs_diff(resize_image(src, 266, 266), src) <= 1e-12);
    CHECK_THROWS_AS(resize_image(src, 0, 3), InvalidShape);
}

TEST_CASE("resize_mask") {
    CHECK(resize_mask(blank_mask(3, 5), 17, 9).count() == 0);
    const BinaryMask full(3, 2, std::vector<std::uint8_t>(6, 1));
    CHECK(resize_mask(full, 11, 13).count() == 143);

    // 2x upscale: the set pixel at (1,0) becomes the block x in {2,3}, y in {0,1}.
    const BinaryMask one(2, 2, {0, 1, 0, 0});
    const auto up = resize_mask(one, 4, 4);
    CHECK(up == BinaryMask(4, 4, {0, 0, 1, 1,  //
                                  0, 0, 1, 1,  //
                                  0, 0, 0, 0,  //
                                  0, 0, 0, 0}));
    CHECK_THROWS_AS(resize_mask(one, 4, 0), InvalidShape);
}

TEST_CASE("hflip") {
    const NormalizedImage ab(2, 1, {0.25, 0.75});
    CHECK(hflip(ab) == NormalizedImage(2, 1, {0.75, 0.25}));

    testing::Engine rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_sample(rng, testing::pick(rng, 1, 20), testing::pick(rng, 1, 20));
        const auto f = hflip(s);
        REQUIRE(hflip(f) == s);
        for (auto c : kOrganClasses) REQUIRE(f.mask(c).count() == s.mask(c).count());
        const auto w = s.width();
        for (std::size_t y = 0; y < s.height(); ++y)
            for (std::size_t x = 0; x < w; ++x) {
                REQUIRE(f.image().at(w - 1 - x, y) == s.image().at(x, y));
                REQUIRE(f.mask(OrganClass::Stomach).at(w - 1 - x, y) == s.mask(OrganClass::Stomach).at(x, y));
            }
    }
}

TEST_CASE("rotate") {
    testing::Engine rng(8);
    const auto s = random_sample(rng, 9, 7);
    CHECK(rotate(s, 0.0) == s);

    const auto full = rotate(s, 360.0);
    CHECK(max_abs_diff(full.image(), s.image()) <= 1e-6);
    CHECK(full.masks() == s.masks());

    for (double angle : {13.0, 90.0, -47.5, 181.0}) {
        const auto r = rotate(s, angle);
        CHECK(r.image().at(4, 3) == doctest::Approx(s.image().at(4, 3)).epsilon(1e-12));
        for (auto c : kOrganClasses) CHECK(r.mask(c).at(4, 3) == s.mask(c).at(4, 3));
        CHECK(in_unit_range(r.image()));
    }
    CHECK_THROWS_AS(rotate(s, std::nan("")), InvalidArgument);
}

TEST_CASE("rotate is counter-clockwise on screen") {
    // A pixel right of centre moves above centre after +90 degrees.
    std::vector<std::uint8_t> bits(25, 0);
    bits[2 * 5 + 4] = 1;
    const auto r = rotate(indicator_sample(BinaryMask(5, 5, bits)), 90.0);
    CHECK(r.mask(OrganClass::LargeBowel).at(2, 0) == 1);
    CHECK(r.mask(OrganClass::LargeBowel).count() == 1);
    CHECK(r.image().at(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("elastic") {
    testing::Engine gen(13);
    const auto s = random_sample(gen, 24, 18);
    Rng r0(1);
    CHECK(elastic(s, 0.0, 3.0, r0) == s);

    Rng a(99), b(99);
    const auto ea = elastic(s, 8.0, 2.0, a);
    const auto eb = elastic(s, 8.0, 2.0, b);
    CHECK(ea == eb);
    for (auto c : kOrganClasses)
        CHECK(std::ranges::all_of(ea.mask(c).bits(), [](auto v) { return v <= 1; }));
    CHECK(in_unit_range(ea.image()));

    Rng f(4);
    const auto field = make_displacement_field(30, 20, 5.0, 2.0, f);
    CHECK(field.dx.size() == 600);
    CHECK(std::ranges::all_of(field.dx, [](double d) { return std::abs(d) <= 5.0; }));
    CHECK(std::ranges::all_of(field.dy, [](double d) { return std::abs(d) <= 5.0; }));

    Rng e(1);
    CHECK_THROWS_AS(elastic(s, -1.0, 2.0, e), InvalidArgument);
    CHECK_THROWS_AS(elastic(s, 1.0, 0.0, e), InvalidArgument);
}

TEST_CASE("spatial ops move image and masks with the same map") {
    testing::Engine gen(21);
    for (int i = 0; i < 20; ++i) {
        const auto s = indicator_sample(testing::random_mask(gen, 16, 12));
        check_joint(rotate(s, testing::real(gen, -180.0, 180.0)));
        Rng r(static_cast<std::uint64_t>(i));
        check_joint(elastic(s, 6.0, 2.0, r));
        check_joint(hflip(s));
    }
}

TEST_CASE("coarse_dropout") {
    const NormalizedImage ones(10, 8, std::vector<double>(80, 1.0));
    AugmentationSpec spec;
    spec.dropout_holes = 0;
    Rng r(1);
    CHECK(coarse_dropout(ones, spec, r) == ones);

    // One 2x2 hole: replay the same stream to find where it lands.
    spec.dropout_holes = 1;
    spec.dropout_hole_w = {2, 2};
    spec.dropout_hole_h = {2, 2};
    Rng a(77), b(77);
    const auto holes = draw_dropout_holes(10, 8, spec, a);
    REQUIRE(holes.size() == 1);
    const auto out = coarse_dropout(ones, spec, b);
    std::size_t zeros = 0;
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 10; ++x) {
            const bool inside = x >= holes[0].x && x < holes[0].x + 2 && y >= holes[0].y && y < holes[0].y + 2;
            CHECK(out.at(x, y) == (inside ? 0.0 : 1.0));
            zeros += out.at(x, y) == 0.0;
        }
    CHECK(zeros == 4);

    AugmentationSpec many;
    many.dropout_holes = 6;
    many.dropout_hole_w = {1, 4};
    many.dropout_hole_h = {2, 5};
    testing::Engine gen(2);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto img = random_image(gen, 20, 15);
        Rng d(seed), h(seed);
        const auto o = coarse_dropout(img, many, d);
        const auto hs = draw_dropout_holes(20, 15, many, h);
        std::size_t changed = 0;
        for (std::size_t y = 0; y < 15; ++y)
            for (std::size_t x = 0; x < 20; ++x) {
                const bool in_hole = std::ranges::any_of(hs, [&](const Rect& q) {
                    return x >= q.x && x < q.x + q.width && y >= q.y && y < q.y + q.height;
                });
                if (!in_hole) REQUIRE(o.at(x, y) == img.at(x, y));
                if (in_hole) REQUIRE(o.at(x, y) == 0.0);
                changed += in_hole;
            }
        REQUIRE(changed <= 6 * 4 * 5);
    }
}

TEST_CASE("dropout holes larger than the image are clamped") {
    AugmentationSpec spec;
    spec.dropout_holes = 3;
    spec.dropout_hole_w = {50, 60};
    spec.dropout_hole_h = {50, 60};
    Rng r(3);
    for (const auto& h : draw_dropout_holes(4, 3, spec, r)) {
        CHECK(h.x + h.width <= 4);
        CHECK(h.y + h.height <= 3);
    }
}

TEST_CASE("intensity") {
    testing::Engine gen(4);
    const auto img = random_image(gen, 9, 9);
    AugmentationSpec spec;
    spec.contrast_range = {1.0, 1.0};
    spec.brightness_delta = 0.0;
    Rng r(5);
    CHECK(intensity_jitter(img, spec, r) == img);

    CHECK(apply_intensity(NormalizedImage(1, 1, {0.75}), 2.0, 0.0).values()[0] == 1.0);
    CHECK(apply_intensity(NormalizedImage(1, 1, {0.1}), 1.0, -0.5).values()[0] == 0.0);

    AugmentationSpec wild;
    wild.contrast_range = {0.1, 3.0};
    wild.brightness_delta = 1.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng j(seed);
        REQUIRE(in_unit_range(intensity_jitter(img, wild, j)));
    }
}

TEST_CASE("augment") {
    testing::Engine gen(31);
    const auto s = random_sample(gen, 40, 30);

    const auto plain = augment(s, resize_only_spec(64, 48));
    CHECK(plain.image() == resize_image(s.image(), 64, 48));
    for (auto c : kOrganClasses) CHECK(plain.mask(c) == resize_mask(s.mask(c), 64, 48));
    CHECK(plain.key() == s.key());

    const AugmentationSpec defaults;
    const auto a = augment(s, defaults);
    CHECK(a.width() == 320);
    CHECK(a.height() == 384);
    CHECK(augment(s, defaults) == a);
    CHECK(in_unit_range(a.image()));

    AugmentationSpec other = defaults;
    other.seed = 1;
    CHECK(!(augment(s, other) == a));

    AugmentationSpec bad;
    bad.hflip_prob = 3;
    CHECK_THROWS_AS(augment(s, bad), InvalidArgument);
}

TEST_CASE("augment draws a separate stream per sample") {
    testing::Engine gen(32);
    const auto s1 = random_sample(gen, 30, 30, 1);
    const Sample s2(s1.image(), s1.masks(), make_slice_key("case7", 3, 2));
    AugmentationSpec spec;
    spec.target_width = 30;
    spec.target_height = 30;
    CHECK(!(augment(s1, spec).image() == augment(s2, spec).image()));
}

TEST_CASE("augment_stack applies one transform to every channel") {
    testing::Engine gen(33);
    const auto img = random_image(gen, 20, 16);
    const Stack25 stack({img, img, img});
    const PerClass<BinaryMask> masks{testing::random_mask(gen, 20, 16), testing::random_mask(gen, 20, 16),
                                     testing::random_mask(gen, 20, 16)};
    AugmentationSpec spec;
    spec.target_width = 24;
    spec.target_height = 24;
    spec.elastic_prob = 1.0;
    spec.dropout_prob = 1.0;
    const auto key = make_slice_key("case1", 1, 5);
    const auto out = augment_stack(stack, masks, key, spec);
    CHECK(out.stack.width() == 24);
    CHECK(out.stack.channel(0) == out.stack.channel(1));
    CHECK(out.stack.channel(1) == out.stack.channel(2));

    const auto single = augment(Sample(img, masks, key), spec);
    CHECK(single.image() == out.stack.channel(1));
    CHECK(single.masks() == out.masks);
}

TEST_CASE("stack_25d") {
    testing::Engine gen(40);
    const std::vector<NormalizedImage> vol{random_image(gen, 4, 3), random_image(gen, 4, 3),
                                           random_image(gen, 4, 3)};
    const auto mid = stack_25d(vol, 1);
    CHECK(mid.channel(0) == vol[0]);
    CHECK(mid.channel(1) == vol[1]);
    CHECK(mid.channel(2) == vol[2]);
    const auto first = stack_25d(vol, 0);
    CHECK(first.channel(0) == vol[0]);
    CHECK(first.channel(1) == vol[0]);
    CHECK(first.channel(2) == vol[1]);
    const auto last = stack_25d(vol, 2);
    CHECK(last.channel(0) == vol[1]);
    CHECK(last.channel(1) == vol[2]);
    CHECK(last.channel(2) == vol[2]);

    CHECK(stack_25d(std::span(vol.data(), 1), 0).channel(2) == vol[0]);
    CHECK_THROWS_AS(stack_25d(vol, 3), InvalidArgument);
    const std::vector<NormalizedImage> ragged{random_image(gen, 4, 3), random_image(gen, 3, 4)};
    CHECK_THROWS_AS(stack_25d(ragged, 0), ShapeMismatch);
}

TEST_CASE("joint flip leaves dice unchanged") {
    testing::Engine gen(41);
    for (int i = 0; i < 100; ++i) {
        const auto w = testing::pick(gen, 1, 30);
        const auto h = testing::pick(gen, 1, 30);
        const auto a = testing::random_mask(gen, w, h);
        const auto b = testing::random_mask(gen, w, h);
        const auto va = make_volume(std::span(&a, 1), {1, 1, 1});
        const auto vb = make_volume(std::span(&b, 1), {1, 1, 1});
        const auto fa = hflip(a);
        const auto fb = hflip(b);
        REQUIRE(dice(make_volume(std::span(&fa, 1), {1, 1, 1}), make_volume(std::span(&fb, 1), {1, 1, 1})) ==
                dice(va, vb));
    }
}

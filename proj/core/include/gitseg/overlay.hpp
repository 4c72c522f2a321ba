#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gitseg/types.hpp"

namespace gitseg {

struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb;  // interleaved, row-major
};

using Rgb = std::array<std::uint8_t, 3>;

// LargeBowel red, SmallBowel green, Stomach blue.
inline constexpr PerClass<Rgb> kClassColors{Rgb{255, 0, 0}, Rgb{0, 255, 0}, Rgb{0, 0, 255}};
inline constexpr double kOverlayAlpha = 0.4;

/// Min-max scaled grayscale base; each set class blends its colour in with
/// alpha 0.4, applied in class order. Pixels covered by no mask keep the
/// grayscale value exactly.
RgbImage render_overlay(const SliceImage& image, const PerClass<BinaryMask>& masks);

}  // namespace gitseg

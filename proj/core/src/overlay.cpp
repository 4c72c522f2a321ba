#include "gitseg/overlay.hpp"

#include <cmath>
#include <string>

#include "gitseg/preprocess.hpp"

namespace gitseg {

RgbImage render_overlay(const SliceImage& image, const PerClass<BinaryMask>& masks) {
    for (const auto& m : masks) {
        if (m.width() != image.width() || m.height() != image.height()) {
            throw ShapeMismatch("render_overlay: mask " + std::to_string(m.width()) + "x" +
                                std::to_string(m.height()) + " does not match image " +
                                std::to_string(image.width()) + "x" + std::to_string(image.height()));
        }
    }
    const auto base = normalize_intensity(image);
    const auto values = base.values();
    RgbImage out{image.width(), image.height(), std::vector<std::uint8_t>(image.size() * 3)};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double gray = std::round(values[i] * 255.0);
        std::array<double, 3> px{gray, gray, gray};
        for (auto c : kOrganClasses) {
            if (!masks[index_of(c)].bits()[i]) continue;
            const auto& color = kClassColors[index_of(c)];
            for (std::size_t ch = 0; ch < 3; ++ch) px[ch] = (1.0 - kOverlayAlpha) * px[ch] + kOverlayAlpha * color[ch];
        }
        for (std::size_t ch = 0; ch < 3; ++ch) out.rgb[3 * i + ch] = static_cast<std::uint8_t>(std::lround(px[ch]));
    }
    return out;
}

}  // namespace gitseg

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gitseg/types.hpp"

namespace gitseg {

/// Decoded PNG samples, interleaved, widened to 16 bits without scaling.
struct PngImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples;
};

PngImage read_png(const std::filesystem::path& path);

/// Loads an 8- or 16-bit grayscale PNG. 8-bit samples are promoted by x257.
SliceImage read_slice_png(const std::filesystem::path& path);

// Writers emit no timestamp or text chunks, so output bytes depend only on
// the pixels.
void write_png_gray8(const std::filesystem::path& path, std::size_t width, std::size_t height,
                     std::span<const std::uint8_t> pixels);
void write_png_gray16(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      std::span<const std::uint16_t> pixels);
void write_png_rgb8(const std::filesystem::path& path, std::size_t width, std::size_t height,
                    std::span<const std::uint8_t> rgb);
void write_png_rgb16(const std::filesystem::path& path, std::size_t width, std::size_t height,
                     std::span<const std::uint16_t> rgb);

/// 0 -> 0, 1 -> 255.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
/// Quantizes [0,1] to 16 bits by round(v * 65535).
void write_normalized_png(const std::filesystem::path& path, const NormalizedImage& image);

}  // namespace gitseg

#include "gitseg/png_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

namespace gitseg {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    return f;
}

void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height, int color_type,
               int bit_depth, std::size_t channels, const void* data) {
    if (width == 0 || height == 0) throw InvalidShape("write_png: empty image");
    auto file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;
    const std::size_t row_bytes = width * channels * bytes_per_sample;
    // Big-endian row buffer built outside the setjmp scope.
    std::vector<png_byte> rows(row_bytes * height);
    if (bit_depth == 16) {
        const auto* src = static_cast<const std::uint16_t*>(data);
        for (std::size_t i = 0; i < width * height * channels; ++i) {
            rows[2 * i] = static_cast<png_byte>(src[i] >> 8);
            rows[2 * i + 1] = static_cast<png_byte>(src[i] & 0xFF);
        }
    } else {
        const auto* src = static_cast<const std::uint8_t*>(data);
        std::copy(src, src + rows.size(), rows.begin());
    }
    std::vector<png_bytep> row_ptrs(height);
    for (std::size_t y = 0; y < height; ++y) row_ptrs[y] = rows.data() + y * row_bytes;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed writing '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

PngImage read_png(const std::filesystem::path& path) {
    auto file = open_file(path, "rb");
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw ParseError("'" + path.string() + "' is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    PngImage img;
    std::vector<png_byte> rows;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("libpng failed reading '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    } else if (depth != 8 && depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("'" + path.string() + "': unsupported bit depth " + std::to_string(depth));
    }
    png_read_update_info(png, info);
    img.width = png_get_image_width(png, info);
    img.height = png_get_image_height(png, info);
    img.channels = png_get_channels(png, info);
    img.bit_depth = png_get_bit_depth(png, info);
    depth = img.bit_depth;
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    rows.resize(row_bytes * img.height);
    row_ptrs.resize(img.height);
    for (std::size_t y = 0; y < img.height; ++y) row_ptrs[y] = rows.data() + y * row_bytes;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = img.width * img.height * img.channels;
    img.samples.resize(n);
    for (std::size_t y = 0; y < img.height; ++y) {
        const png_byte* r = row_ptrs[y];
        for (std::size_t i = 0; i < img.width * img.channels; ++i) {
            img.samples[y * img.width * img.channels + i] =
                depth == 16 ? static_cast<std::uint16_t>((r[2 * i] << 8) | r[2 * i + 1]) : r[i];
        }
    }
    return img;
}

SliceImage read_slice_png(const std::filesystem::path& path) {
    auto img = read_png(path);
    if (img.channels != 1) {
        throw ParseError("'" + path.string() + "': expected a grayscale PNG, got " + std::to_string(img.channels) +
                         " channels");
    }
    if (img.bit_depth != 8 && img.bit_depth != 16) {
        throw ParseError("'" + path.string() + "': unsupported bit depth " + std::to_string(img.bit_depth));
    }
    if (img.bit_depth == 8) {
        for (auto& s : img.samples) s = static_cast<std::uint16_t>(s * 257);
    }
    return SliceImage(img.width, img.height, std::move(img.samples));
}

void write_png_gray8(const std::filesystem::path& path, std::size_t width, std::size_t height,
                     std::span<const std::uint8_t> pixels) {
    if (pixels.size() != width * height) throw InvalidShape("write_png_gray8: size mismatch");
    write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 8, 1, pixels.data());
}

void write_png_gray16(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      std::span<const std::uint16_t> pixels) {
    if (pixels.size() != width * height) throw InvalidShape("write_png_gray16: size mismatch");
    write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 16, 1, pixels.data());
}

void write_png_rgb8(const std::filesystem::path& path, std::size_t width, std::size_t height,
                    std::span<const std::uint8_t> rgb) {
    if (rgb.size() != width * height * 3) throw InvalidShape("write_png_rgb8: size mismatch");
    write_png(path, width, height, PNG_COLOR_TYPE_RGB, 8, 3, rgb.data());
}

void write_png_rgb16(const std::filesystem::path& path, std::size_t width, std::size_t height,
                     std::span<const std::uint16_t> rgb) {
    if (rgb.size() != width * height * 3) throw InvalidShape("write_png_rgb16: size mismatch");
    write_png(path, width, height, PNG_COLOR_TYPE_RGB, 16, 3, rgb.data());
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> px(mask.size());
    const auto bits = mask.bits();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = bits[i] ? 255 : 0;
    write_png_gray8(path, mask.width(), mask.height(), px);
}

void write_normalized_png(const std::filesystem::path& path, const NormalizedImage& image) {
    std::vector<std::uint16_t> px(image.size());
    const auto v = image.values();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint16_t>(std::lround(v[i] * 65535.0));
    write_png_gray16(path, image.width(), image.height(), px);
}

}  // namespace gitseg

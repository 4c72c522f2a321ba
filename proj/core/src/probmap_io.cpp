#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gitseg/ensemble.hpp"

namespace gitseg {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_probmap_file(const std::filesystem::path& path, const PerClass<ProbMap>& maps) {
    const auto w = maps[0].width();
    const auto h = maps[0].height();
    for (const auto& m : maps) {
        if (m.width() != w || m.height() != h) throw ShapeMismatch("write_probmap_file: maps differ in shape");
    }
    std::string buf;
    buf.reserve(12 + kClassCount * w * h * 4);
    put_u32(buf, static_cast<std::uint32_t>(w));
    put_u32(buf, static_cast<std::uint32_t>(h));
    put_u32(buf, static_cast<std::uint32_t>(kClassCount));
    for (const auto& m : maps)
        for (double v : m.values()) put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

PerClass<ProbMap> read_probmap_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open probability map '" + path.string() + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 12) throw ParseError("probability map '" + path.string() + "': truncated header");
    const std::size_t w = get_u32(p);
    const std::size_t h = get_u32(p + 4);
    const std::size_t classes = get_u32(p + 8);
    if (classes != kClassCount) {
        throw ParseError("probability map '" + path.string() + "': expected 3 classes, got " +
                         std::to_string(classes));
    }
    if (bytes.size() != 12 + classes * w * h * 4) {
        throw ParseError("probability map '" + path.string() + "': size does not match " + std::to_string(w) +
                         "x" + std::to_string(h) + " header");
    }
    std::array<std::vector<double>, kClassCount> values;
    const unsigned char* cursor = p + 12;
    for (auto& v : values) {
        v.resize(w * h);
        for (auto& x : v) {
            x = static_cast<double>(std::bit_cast<float>(get_u32(cursor)));
            cursor += 4;
        }
    }
    try {
        return {ProbMap(w, h, std::move(values[0])), ProbMap(w, h, std::move(values[1])),
                ProbMap(w, h, std::move(values[2]))};
    } catch (const Error& e) {
        throw ParseError("probability map '" + path.string() + "': " + e.what());
    }
}

}  // namespace gitseg

#include "gitseg/rle.hpp"

#include <charconv>
#include <cstdint>
#include <vector>

namespace gitseg {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::vector<std::string_view> split_tokens(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

std::int64_t parse_positive(std::string_view token, std::size_t index) {
    std::int64_t value = 0;
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), last, value);
    if (ec != std::errc{} || ptr != last) {
        throw MalformedRle(RleErrorKind::NonInteger, index, "'" + std::string(token) + "'");
    }
    if (value <= 0) {
        throw MalformedRle(RleErrorKind::NonPositive, index, "'" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

BinaryMask decode_rle(std::string_view rle, std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
        throw InvalidShape("decode_rle: width and height must be >= 1");
    }
    const auto total = static_cast<std::int64_t>(width * height);
    const auto tokens = split_tokens(rle);
    if (tokens.size() % 2 != 0) {
        throw MalformedRle(RleErrorKind::OddTokenCount, tokens.size() - 1,
                           std::to_string(tokens.size()) + " tokens");
    }

    std::vector<std::uint8_t> bits(static_cast<std::size_t>(total), 0);
    for (std::size_t t = 0; t < tokens.size(); t += 2) {
        const std::int64_t start = parse_positive(tokens[t], t);
        const std::int64_t length = parse_positive(tokens[t + 1], t + 1);
        if (start > total || length > total - start + 1) {
            throw MalformedRle(RleErrorKind::RunOutOfBounds, t + 1,
                               "run " + std::to_string(start) + "+" + std::to_string(length) +
                                   " exceeds " + std::to_string(total) + " pixels");
        }
        auto* run = bits.data() + (start - 1);
        for (std::int64_t i = 0; i < length; ++i) {
            if (run[i]) {
                throw MalformedRle(RleErrorKind::OverlappingRuns, t,
                                   "pixel " + std::to_string(start + i) + " already set");
            }
            run[i] = 1;
        }
    }
    return BinaryMask(width, height, std::move(bits));
}

std::string encode_rle(const BinaryMask& mask) {
    const auto bits = mask.bits();
    std::string out;
    char buf[24];
    const auto append = [&](std::size_t value) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
        out.append(buf, ptr);
    };

    std::size_t i = 0;
    const std::size_t n = bits.size();
    while (i < n) {
        if (!bits[i]) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < n && bits[i]) ++i;
        if (!out.empty()) out.push_back(' ');
        append(start + 1);
        out.push_back(' ');
        append(i - start);
    }
    return out;
}

}  // namespace gitseg

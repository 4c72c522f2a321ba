#include "gitseg/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace gitseg {

namespace {

void require_shape(std::size_t width, std::size_t height, std::size_t length, const char* what) {
    if (width == 0 || height == 0) {
        throw InvalidShape(std::string(what) + ": width and height must be >= 1, got " +
                           std::to_string(width) + "x" + std::to_string(height));
    }
    if (length != width * height) {
        throw InvalidShape(std::string(what) + ": expected " + std::to_string(width * height) +
                           " values, got " + std::to_string(length));
    }
}

void require_unit_interval(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument(std::string(what) + ": value at index " + std::to_string(i) +
                                  " outside [0,1]");
        }
    }
}

bool parse_u32(std::string_view text, std::uint32_t& out) {
    if (text.empty()) return false;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

const char* to_string(RleErrorKind kind) noexcept {
    switch (kind) {
        case RleErrorKind::OddTokenCount: return "odd token count";
        case RleErrorKind::NonInteger: return "non-integer token";
        case RleErrorKind::NonPositive: return "non-positive value";
        case RleErrorKind::RunOutOfBounds: return "run exceeds mask";
        case RleErrorKind::OverlappingRuns: return "overlapping runs";
    }
    return "unknown";
}

MalformedRle::MalformedRle(RleErrorKind kind, std::size_t token_index, const std::string& detail)
    : Error("malformed RLE (" + std::string(to_string(kind)) + ") at token " +
            std::to_string(token_index) + ": " + detail),
      kind_(kind),
      token_index_(token_index) {}

SliceImage::SliceImage(std::size_t width, std::size_t height, std::vector<std::uint16_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    require_shape(width_, height_, pixels_.size(), "SliceImage");
}

NormalizedImage::NormalizedImage(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    require_shape(width_, height_, values_.size(), "NormalizedImage");
    require_unit_interval(values_, "NormalizedImage");
}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    require_shape(width_, height_, bits_.size(), "BinaryMask");
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] > 1) {
            throw InvalidArgument("BinaryMask: element " + std::to_string(i) + " is not 0 or 1");
        }
    }
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

ProbMap::ProbMap(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    require_shape(width_, height_, values_.size(), "ProbMap");
    require_unit_interval(values_, "ProbMap");
}

void validate_spacing(const Spacing& spacing) {
    const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(spacing.x) || !ok(spacing.y) || !ok(spacing.z)) {
        throw InvalidArgument("spacing components must be finite and > 0");
    }
}

MaskVolume::MaskVolume(std::size_t width, std::size_t height, std::size_t depth,
                       std::vector<std::uint8_t> voxels, Spacing spacing)
    : width_(width), height_(height), depth_(depth), voxels_(std::move(voxels)), spacing_(spacing) {
    if (depth_ == 0) throw EmptyVolume("MaskVolume: depth must be >= 1");
    if (width_ == 0 || height_ == 0) throw InvalidShape("MaskVolume: width and height must be >= 1");
    if (voxels_.size() != width_ * height_ * depth_) {
        throw InvalidShape("MaskVolume: expected " + std::to_string(width_ * height_ * depth_) +
                           " voxels, got " + std::to_string(voxels_.size()));
    }
    validate_spacing(spacing_);
    for (std::size_t i = 0; i < voxels_.size(); ++i) {
        if (voxels_[i] > 1) {
            throw InvalidArgument("MaskVolume: voxel " + std::to_string(i) + " is not 0 or 1");
        }
    }
}

std::size_t MaskVolume::count() const noexcept {
    return static_cast<std::size_t>(std::count(voxels_.begin(), voxels_.end(), std::uint8_t{1}));
}

BinaryMask MaskVolume::slice(std::size_t z) const {
    if (z >= depth_) throw InvalidArgument("MaskVolume::slice: index out of range");
    const std::size_t plane = width_ * height_;
    const auto first = voxels_.begin() + static_cast<std::ptrdiff_t>(z * plane);
    return BinaryMask(width_, height_, std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(plane)));
}

ClassLabels::ClassLabels() : ClassLabels(PerClass<std::string>{"large_bowel", "small_bowel", "stomach"}) {}

ClassLabels::ClassLabels(PerClass<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < kClassCount; ++i) {
        if (labels_[i].empty()) throw InvalidArgument("class labels must be non-empty");
        for (std::size_t j = 0; j < i; ++j) {
            if (labels_[i] == labels_[j]) {
                throw InvalidArgument("class labels must be distinct: '" + labels_[i] + "'");
            }
        }
    }
}

OrganClass ClassLabels::parse(std::string_view label) const {
    for (auto c : kOrganClasses) {
        if (labels_[index_of(c)] == label) return c;
    }
    throw UnknownClass("unknown class label '" + std::string(label) + "'");
}

SliceKey make_slice_key(std::string case_id, std::uint32_t day, std::uint32_t slice_index) {
    if (case_id.empty()) throw InvalidArgument("SliceKey: case_id must be non-empty");
    return SliceKey{std::move(case_id), day, slice_index};
}

std::string to_id(const SliceKey& key) {
    std::string index = std::to_string(key.slice_index);
    if (index.size() < 4) index.insert(0, 4 - index.size(), '0');
    return key.case_id + "_day" + std::to_string(key.day) + "_slice_" + index;
}

SliceKey parse_slice_id(std::string_view id) {
    const auto slice_pos = id.rfind("_slice_");
    if (slice_pos == std::string_view::npos) {
        throw ParseError("slice id '" + std::string(id) + "': missing '_slice_' segment");
    }
    const auto head = id.substr(0, slice_pos);
    const auto day_pos = head.rfind("_day");
    if (day_pos == std::string_view::npos || day_pos == 0) {
        throw ParseError("slice id '" + std::string(id) + "': missing '_day' segment");
    }
    std::uint32_t day = 0;
    std::uint32_t index = 0;
    if (!parse_u32(head.substr(day_pos + 4), day)) {
        throw ParseError("slice id '" + std::string(id) + "': bad day '" +
                         std::string(head.substr(day_pos + 4)) + "'");
    }
    if (!parse_u32(id.substr(slice_pos + 7), index)) {
        throw ParseError("slice id '" + std::string(id) + "': bad slice index '" +
                         std::string(id.substr(slice_pos + 7)) + "'");
    }
    return make_slice_key(std::string(head.substr(0, day_pos)), day, index);
}

BinaryMask blank_mask(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
        throw InvalidShape("blank_mask: width and height must be >= 1");
    }
    return BinaryMask(width, height, std::vector<std::uint8_t>(width * height, 0));
}

MaskVolume make_volume(std::span<const BinaryMask> slices, Spacing spacing) {
    if (slices.empty()) throw EmptyVolume("make_volume: no slices");
    const std::size_t w = slices.front().width();
    const std::size_t h = slices.front().height();
    std::vector<std::uint8_t> voxels;
    voxels.reserve(w * h * slices.size());
    for (std::size_t z = 0; z < slices.size(); ++z) {
        const auto& s = slices[z];
        if (s.width() != w || s.height() != h) {
            throw ShapeMismatch("make_volume: slice " + std::to_string(z) + " is " +
                                std::to_string(s.width()) + "x" + std::to_string(s.height()) +
                                ", expected " + std::to_string(w) + "x" + std::to_string(h));
        }
        voxels.insert(voxels.end(), s.bits().begin(), s.bits().end());
    }
    return MaskVolume(w, h, slices.size(), std::move(voxels), spacing);
}

}  // namespace gitseg

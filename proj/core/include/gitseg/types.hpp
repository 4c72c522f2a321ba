#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gitseg/error.hpp"

namespace gitseg {

/// One 16-bit grayscale MRI slice, row-major.
class SliceImage {
public:
    SliceImage(std::size_t width, std::size_t height, std::vector<std::uint16_t> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    std::uint16_t at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
    std::span<const std::uint16_t> pixels() const noexcept { return pixels_; }

    friend bool operator==(const SliceImage&, const SliceImage&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<std::uint16_t> pixels_;
};

/// Real-valued intensities in [0,1], row-major.
class NormalizedImage {
public:
    NormalizedImage(std::size_t width, std::size_t height, std::vector<double> values);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const NormalizedImage&, const NormalizedImage&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> values_;
};

/// Per-pixel {0,1} mask for one slice and one class, row-major.
class BinaryMask {
public:
    BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }
    bool at(std::size_t x, std::size_t y) const { return bits_[y * width_ + x] != 0; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<std::uint8_t> bits_;
};

/// Per-pixel class probability in [0,1], row-major.
class ProbMap {
public:
    ProbMap(std::size_t width, std::size_t height, std::vector<double> values);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const ProbMap&, const ProbMap&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> values_;
};

/// Physical voxel size in millimetres.
struct Spacing {
    double x = 1.5;
    double y = 1.5;
    double z = 3.0;

    friend bool operator==(const Spacing&, const Spacing&) = default;
};

inline constexpr Spacing kDefaultSpacing{1.5, 1.5, 3.0};

/// Ordered stack of same-shaped binary slices with voxel spacing. Voxels are
/// stored contiguously, x fastest, then y, then z.
class MaskVolume {
public:
    MaskVolume(std::size_t width, std::size_t height, std::size_t depth,
               std::vector<std::uint8_t> voxels, Spacing spacing = kDefaultSpacing);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return voxels_.size(); }
    const Spacing& spacing() const noexcept { return spacing_; }
    bool at(std::size_t x, std::size_t y, std::size_t z) const {
        return voxels_[(z * height_ + y) * width_ + x] != 0;
    }
    std::span<const std::uint8_t> voxels() const noexcept { return voxels_; }
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    BinaryMask slice(std::size_t z) const;
    bool same_shape(const MaskVolume& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_ && depth_ == other.depth_;
    }

    friend bool operator==(const MaskVolume&, const MaskVolume&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::size_t depth_;
    std::vector<std::uint8_t> voxels_;
    Spacing spacing_;
};

enum class OrganClass : std::uint8_t { LargeBowel = 0, SmallBowel = 1, Stomach = 2 };

inline constexpr std::size_t kClassCount = 3;
inline constexpr std::array<OrganClass, kClassCount> kOrganClasses{
    OrganClass::LargeBowel, OrganClass::SmallBowel, OrganClass::Stomach};

constexpr std::size_t index_of(OrganClass c) noexcept { return static_cast<std::size_t>(c); }

/// One value per organ class, indexed by OrganClass order.
template <typename T>
using PerClass = std::array<T, kClassCount>;

/// String labels for the three organ classes. Defaults match the public
/// GI-tract annotation tables.
class ClassLabels {
public:
    ClassLabels();
    explicit ClassLabels(PerClass<std::string> labels);

    const std::string& label(OrganClass c) const noexcept { return labels_[index_of(c)]; }
    OrganClass parse(std::string_view label) const;

private:
    PerClass<std::string> labels_;
};

/// Identity of one slice. `slice_index` is the dataset's slice number; the
/// 0-based position inside a volume is resolved by DatasetIndex.
struct SliceKey {
    std::string case_id;
    std::uint32_t day = 0;
    std::uint32_t slice_index = 0;

    friend auto operator<=>(const SliceKey&, const SliceKey&) = default;
    friend bool operator==(const SliceKey&, const SliceKey&) = default;
};

SliceKey make_slice_key(std::string case_id, std::uint32_t day, std::uint32_t slice_index);

/// "case{c}_day{d}_slice_{iiii}" where case_id already carries the "case" prefix.
std::string to_id(const SliceKey& key);
SliceKey parse_slice_id(std::string_view id);

BinaryMask blank_mask(std::size_t width, std::size_t height);
MaskVolume make_volume(std::span<const BinaryMask> slices, Spacing spacing = kDefaultSpacing);
void validate_spacing(const Spacing& spacing);

}  // namespace gitseg

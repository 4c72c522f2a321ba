#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gitseg/augment_spec.hpp"
#include "gitseg/random.hpp"
#include "gitseg/types.hpp"

namespace gitseg {

/// Image plus one mask per organ class, all of identical shape.
class Sample {
public:
    Sample(NormalizedImage image, PerClass<BinaryMask> masks, SliceKey key);

    const NormalizedImage& image() const noexcept { return image_; }
    const PerClass<BinaryMask>& masks() const noexcept { return masks_; }
    const BinaryMask& mask(OrganClass c) const noexcept { return masks_[index_of(c)]; }
    const SliceKey& key() const noexcept { return key_; }
    std::size_t width() const noexcept { return image_.width(); }
    std::size_t height() const noexcept { return image_.height(); }

    friend bool operator==(const Sample&, const Sample&) = default;

private:
    NormalizedImage image_;
    PerClass<BinaryMask> masks_;
    SliceKey key_;
};

/// 2.5D input: previous, current and next slice as three channels.
class Stack25 {
public:
    explicit Stack25(std::array<NormalizedImage, 3> channels);

    const std::array<NormalizedImage, 3>& channels() const noexcept { return channels_; }
    const NormalizedImage& channel(std::size_t i) const { return channels_.at(i); }
    std::size_t width() const noexcept { return channels_[0].width(); }
    std::size_t height() const noexcept { return channels_[0].height(); }

    friend bool operator==(const Stack25&, const Stack25&) = default;

private:
    std::array<NormalizedImage, 3> channels_;
};

struct Rect {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t width = 0;
    std::size_t height = 0;
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Per-pixel displacement in pixels, row-major.
struct DisplacementField {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> dx;
    std::vector<double> dy;
};

/// Identifiers mixed into the RNG stream seed, one per random stage.
enum class AugmentStage : std::uint64_t {
    Flip = 1,
    Rotate = 2,
    Elastic = 3,
    Dropout = 4,
    Intensity = 5,
};

/// Per-slice min-max scaling to [0,1]; a constant slice maps to zeros.
NormalizedImage normalize_intensity(const SliceImage& image);

/// Bilinear resampling with pixel-centre alignment and edge clamping.
NormalizedImage resize_image(const NormalizedImage& image, std::size_t width, std::size_t height);
/// Nearest-neighbour resampling with pixel-centre alignment.
BinaryMask resize_mask(const BinaryMask& mask, std::size_t width, std::size_t height);

NormalizedImage hflip(const NormalizedImage& image);
BinaryMask hflip(const BinaryMask& mask);
Sample hflip(const Sample& sample);

/// Rotation about the image centre, counter-clockwise on screen for positive
/// angles. Bilinear for the image, nearest for masks, zero fill outside.
Sample rotate(const Sample& sample, double angle_deg);

/// Draws a displacement field: uniform(-1,1) noise for dx then dy (row-major),
/// each Gaussian-smoothed with radius ceil(3 sigma) and replicated borders,
/// then scaled by alpha. |dx|, |dy| <= alpha.
DisplacementField make_displacement_field(std::size_t width, std::size_t height, double alpha,
                                          double sigma, Rng& rng);
Sample elastic(const Sample& sample, double alpha, double sigma, Rng& rng);

/// Draws spec.dropout_holes rectangles. Per hole, in order: width, height,
/// x, y. Hole sizes are clamped to the image dimensions.
std::vector<Rect> draw_dropout_holes(std::size_t width, std::size_t height,
                                     const AugmentationSpec& spec, Rng& rng);
NormalizedImage apply_holes(const NormalizedImage& image, std::span<const Rect> holes);
BinaryMask apply_holes(const BinaryMask& mask, std::span<const Rect> holes);
NormalizedImage coarse_dropout(const NormalizedImage& image, const AugmentationSpec& spec, Rng& rng);

/// out = clamp(contrast * in + brightness, 0, 1)
NormalizedImage apply_intensity(const NormalizedImage& image, double contrast, double brightness);
/// Draws contrast ~ U(contrast_range) then brightness ~ U(-delta, +delta).
NormalizedImage intensity_jitter(const NormalizedImage& image, const AugmentationSpec& spec, Rng& rng);

/// resize -> hflip? -> rotate -> elastic? -> dropout? -> intensity?
///
/// Each random stage draws from its own stream derived from
/// (spec.seed, to_id(sample.key()), AugmentStage), so the output is a pure
/// function of (sample, spec).
Sample augment(const Sample& sample, const AugmentationSpec& spec);

struct AugmentedStack {
    Stack25 stack;
    PerClass<BinaryMask> masks;
};

/// augment() for 2.5D input: one geometric transform shared by all three
/// channels and the masks, one intensity adjustment shared by all channels.
AugmentedStack augment_stack(const Stack25& stack, const PerClass<BinaryMask>& masks,
                             const SliceKey& key, const AugmentationSpec& spec);

/// Channels (index-1, index, index+1) with indices clamped to the volume.
Stack25 stack_25d(std::span<const NormalizedImage> volume, std::size_t index);

}  // namespace gitseg

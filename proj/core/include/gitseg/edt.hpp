#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gitseg/types.hpp"

namespace gitseg {

/// Per-voxel Euclidean distance (mm) to the nearest foreground voxel;
/// +infinity everywhere when the source volume has no foreground.
class DistanceField {
public:
    DistanceField(std::size_t width, std::size_t height, std::size_t depth, Spacing spacing,
                  std::vector<double> values);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t depth() const noexcept { return depth_; }
    const Spacing& spacing() const noexcept { return spacing_; }
    double at(std::size_t x, std::size_t y, std::size_t z) const {
        return values_[(z * height_ + y) * width_ + x];
    }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t width_;
    std::size_t height_;
    std::size_t depth_;
    Spacing spacing_;
    std::vector<double> values_;
};

/// Exact squared Euclidean distance transform: one linear pass along x, then
/// lower-envelope-of-parabolas passes along y and z, with spacing applied per
/// axis. Each squared axis term is formed as (s*s)*(d*d) and terms are summed
/// x, then y, then z.
std::vector<double> squared_edt(const MaskVolume& volume);

/// sqrt of squared_edt, taken once at the end.
DistanceField edt3d(const MaskVolume& volume);

}  // namespace gitseg

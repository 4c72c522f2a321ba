#pragma once

#include <optional>

#include "gitseg/types.hpp"

namespace gitseg {

inline constexpr double kDiceWeight = 0.4;
inline constexpr double kHausdorffWeight = 0.6;

/// 2|PM ∩ OM| / (|PM| + |OM|); 1.0 when both volumes are empty.
double dice(const MaskVolume& pm, const MaskVolume& om);

/// Symmetric Hausdorff distance (mm) between the foreground voxel sets, by
/// comparing every pair. O(|PM| * |OM|); the reference the fast path is
/// checked against. Throws EmptyForeground when either side is empty.
double hausdorff_brute(const MaskVolume& pm, const MaskVolume& om);

/// Same quantity via one distance transform per side. Under unit spacing
/// the result is bit-identical to hausdorff_brute.
double hausdorff_fast(const MaskVolume& pm, const MaskVolume& om);

/// Physical distance between opposite corner voxel centres of the volume.
double volume_diagonal(const MaskVolume& volume);

/// 1 - HD / diagonal, clamped to [0,1]. Both empty -> 1, exactly one
/// empty -> 0.
double hd_score(const MaskVolume& pm, const MaskVolume& om);

/// 0.4 * dice + 0.6 * hd_score; both inputs must lie in [0,1].
double composite(double dice_value, double hd_score_value);

struct ClassScore {
    double dice = 0.0;
    // Absent when either side has no foreground.
    std::optional<double> hausdorff_mm;
    double hd_score = 0.0;
    double composite = 0.0;
};

struct CaseReport {
    PerClass<ClassScore> classes;
    double mean_dice = 0.0;
    double mean_hd_score = 0.0;
    double mean_composite = 0.0;
};

/// Scores each class and takes the unweighted mean over the three classes.
CaseReport score_case(const PerClass<MaskVolume>& pred, const PerClass<MaskVolume>& truth);

}  // namespace gitseg

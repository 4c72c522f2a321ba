#include "gitseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gitseg/edt.hpp"

namespace gitseg {

namespace {

void require_same_shape(const MaskVolume& a, const MaskVolume& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeMismatch(std::string(what) + ": volumes differ in shape (" + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + "x" + std::to_string(a.depth()) + " vs " +
                            std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" +
                            std::to_string(b.depth()) + ")");
    }
}

void require_foreground(const MaskVolume& pm, const MaskVolume& om, const char* what) {
    if (pm.empty() || om.empty()) {
        throw EmptyForeground(std::string(what) + ": Hausdorff distance is undefined for an empty foreground");
    }
}

struct Points {
    std::vector<double> x, y, z;
};

Points foreground_points(const MaskVolume& v) {
    Points p;
    const auto bits = v.voxels();
    std::size_t i = 0;
    for (std::size_t z = 0; z < v.depth(); ++z)
        for (std::size_t y = 0; y < v.height(); ++y)
            for (std::size_t x = 0; x < v.width(); ++x, ++i)
                if (bits[i]) {
                    p.x.push_back(static_cast<double>(x));
                    p.y.push_back(static_cast<double>(y));
                    p.z.push_back(static_cast<double>(z));
                }
    return p;
}

// max over a of min over b of the squared distance, summed in the same
// order as squared_edt.
double directed_squared(const Points& a, const Points& b, const Spacing& s) {
    const double wx = s.x * s.x;
    const double wy = s.y * s.y;
    const double wz = s.z * s.z;
    const std::size_t nb = b.x.size();
    const double* bx = b.x.data();
    const double* by = b.y.data();
    const double* bz = b.z.data();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        const double ax = a.x[i];
        const double ay = a.y[i];
        const double az = a.z[i];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nb; ++j) {
            const double dx = ax - bx[j];
            const double dy = ay - by[j];
            const double dz = az - bz[j];
            const double d2 = (wx * (dx * dx) + wy * (dy * dy)) + wz * (dz * dz);
            best = d2 < best ? d2 : best;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

// max of the field over the foreground of `mask`.
double max_over_foreground(const std::vector<double>& field, const MaskVolume& mask) {
    const auto bits = mask.voxels();
    double worst = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] && field[i] > worst) worst = field[i];
    return worst;
}

double similarity(double hd, double diag) {
    if (diag == 0.0) return 1.0;
    return std::clamp(1.0 - hd / diag, 0.0, 1.0);
}

void require_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument(std::string("composite: ") + name + " must be in [0,1]");
    }
}

}  // namespace

double dice(const MaskVolume& pm, const MaskVolume& om) {
    require_same_shape(pm, om, "dice");
    const auto a = pm.voxels();
    const auto b = om.voxels();
    std::size_t inter = 0;
    std::size_t na = 0;
    std::size_t nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i];
        nb += b[i];
        inter += a[i] & b[i];
    }
    if (na + nb == 0) return 1.0;
    return static_cast<double>(2 * inter) / static_cast<double>(na + nb);
}

double hausdorff_brute(const MaskVolume& pm, const MaskVolume& om) {
    require_same_shape(pm, om, "hausdorff_brute");
    require_foreground(pm, om, "hausdorff_brute");
    const auto a = foreground_points(pm);
    const auto b = foreground_points(om);
    const auto& s = pm.spacing();
    return std::sqrt(std::max(directed_squared(a, b, s), directed_squared(b, a, s)));
}

double hausdorff_fast(const MaskVolume& pm, const MaskVolume& om) {
    require_same_shape(pm, om, "hausdorff_fast");
    require_foreground(pm, om, "hausdorff_fast");
    // Distances use pm's spacing on both sides, matching hausdorff_brute.
    double worst = 0.0;
    if (om.spacing() == pm.spacing()) {
        worst = max_over_foreground(squared_edt(om), pm);
    } else {
        const MaskVolume om_rescaled(om.width(), om.height(), om.depth(),
                                     std::vector<std::uint8_t>(om.voxels().begin(), om.voxels().end()),
                                     pm.spacing());
        worst = max_over_foreground(squared_edt(om_rescaled), pm);
    }
    worst = std::max(worst, max_over_foreground(squared_edt(pm), om));
    return std::sqrt(worst);
}

double volume_diagonal(const MaskVolume& v) {
    const auto& s = v.spacing();
    const double dx = static_cast<double>(v.width() - 1);
    const double dy = static_cast<double>(v.height() - 1);
    const double dz = static_cast<double>(v.depth() - 1);
    return std::sqrt((s.x * s.x * (dx * dx) + s.y * s.y * (dy * dy)) + s.z * s.z * (dz * dz));
}

double hd_score(const MaskVolume& pm, const MaskVolume& om) {
    require_same_shape(pm, om, "hd_score");
    const bool pm_empty = pm.empty();
    const bool om_empty = om.empty();
    if (pm_empty && om_empty) return 1.0;
    if (pm_empty || om_empty) return 0.0;
    return similarity(hausdorff_fast(pm, om), volume_diagonal(pm));
}

double composite(double dice_value, double hd_score_value) {
    require_unit(dice_value, "dice");
    require_unit(hd_score_value, "hd_score");
    return kDiceWeight * dice_value + kHausdorffWeight * hd_score_value;
}

CaseReport score_case(const PerClass<MaskVolume>& pred, const PerClass<MaskVolume>& truth) {
    CaseReport report;
    for (auto c : kOrganClasses) {
        const auto& p = pred[index_of(c)];
        const auto& t = truth[index_of(c)];
        require_same_shape(p, t, "score_case");
        auto& row = report.classes[index_of(c)];
        row.dice = dice(p, t);
        const bool p_empty = p.empty();
        const bool t_empty = t.empty();
        if (!p_empty && !t_empty) {
            row.hausdorff_mm = hausdorff_fast(p, t);
            row.hd_score = similarity(*row.hausdorff_mm, volume_diagonal(p));
        } else {
            row.hd_score = p_empty && t_empty ? 1.0 : 0.0;
        }
        row.composite = composite(row.dice, row.hd_score);
    }
    const auto mean = [&](auto field) {
        double sum = 0.0;
        for (const auto& row : report.classes) sum += row.*field;
        return sum / static_cast<double>(kClassCount);
    };
    report.mean_dice = mean(&ClassScore::dice);
    report.mean_hd_score = mean(&ClassScore::hd_score);
    report.mean_composite = mean(&ClassScore::composite);
    return report;
}

}  // namespace gitseg

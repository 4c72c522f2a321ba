#include "gitseg/edt.hpp"

#include <cmath>
#include <limits>

namespace gitseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas w2*(q - v)^2 + f(v) over the finite sites of f.
// Sites with f == inf do not contribute. Input and output may alias.
class Envelope {
public:
    explicit Envelope(std::size_t n) : sites_(n), values_(n), keys_(n), bounds_(n + 1) {}

    void run(double* f, std::size_t n, double w2) {
        const double two_w2 = 2.0 * w2;
        long k = -1;
        for (std::size_t q = 0; q < n; ++q) {
            if (f[q] == kInf) continue;
            const double dq = static_cast<double>(q);
            const double key = f[q] + w2 * (dq * dq);
            // Pop sites hidden by q: their intersection with q falls at or left
            // of where their own segment starts. bounds[0] is -inf, so the
            // first site is never popped and k stays >= 0 once set.
            double s = -kInf;
            if (k >= 0) {
                double num = 0.0;
                double den = 0.0;
                while (true) {
                    const auto kk = static_cast<std::size_t>(k);
                    num = key - keys_[kk];
                    den = two_w2 * (dq - static_cast<double>(sites_[kk]));
                    if (num > bounds_[kk] * den) break;
                    --k;
                }
                s = num / den;
            }
            const auto kk = static_cast<std::size_t>(++k);
            sites_[kk] = q;
            values_[kk] = f[q];
            keys_[kk] = key;
            bounds_[kk] = s;
        }

        if (k < 0) return;  // every entry is already inf
        const auto last = static_cast<std::size_t>(k);
        bounds_[last + 1] = kInf;
        // Site j owns the integer positions q with bounds[j] <= q <= bounds[j+1].
        std::size_t q = 0;
        for (std::size_t j = 0; j <= last && q < n; ++j) {
            const double v = static_cast<double>(sites_[j]);
            const double fv = values_[j];
            const double right = bounds_[j + 1];
            std::size_t end = n;
            if (right < 0.0) {
                end = 0;
            } else if (right < static_cast<double>(n - 1)) {
                end = static_cast<std::size_t>(right) + 1;
            }
            for (; q < end; ++q) {
                const double d = static_cast<double>(q) - v;
                f[q] = w2 * (d * d) + fv;
            }
        }
    }

private:
    std::vector<std::size_t> sites_;
    std::vector<double> values_;
    std::vector<double> keys_;
    std::vector<double> bounds_;
};

// Rows along x: distance to the nearest set bit by two scans.
void pass_x(const MaskVolume& vol, std::vector<double>& out) {
    const std::size_t w = vol.width();
    const std::size_t rows = vol.height() * vol.depth();
    const double w2 = vol.spacing().x * vol.spacing().x;
    const auto bits = vol.voxels();
    std::vector<long> nearest(w);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::uint8_t* in = bits.data() + r * w;
        double* o = out.data() + r * w;
        long last = -1;
        for (std::size_t x = 0; x < w; ++x) {
            if (in[x]) last = static_cast<long>(x);
            nearest[x] = last < 0 ? -1 : static_cast<long>(x) - last;
        }
        last = -1;
        for (std::size_t x = w; x-- > 0;) {
            if (in[x]) last = static_cast<long>(x);
            long d = nearest[x];
            if (last >= 0) {
                const long ahead = last - static_cast<long>(x);
                if (d < 0 || ahead < d) d = ahead;
            }
            if (d < 0) {
                o[x] = kInf;
            } else {
                const double dd = static_cast<double>(d);
                o[x] = w2 * (dd * dd);
            }
        }
    }
}

// For each z-plane, transforms all columns along y. Columns are gathered into
// a contiguous scratch buffer so the envelope runs on unit-stride data.
void pass_y(std::vector<double>& data, std::size_t w, std::size_t h, std::size_t d, double w2) {
    std::vector<double> buf(w * h);
    Envelope env(h);
    for (std::size_t z = 0; z < d; ++z) {
        double* plane = data.data() + z * w * h;
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) buf[x * h + y] = plane[y * w + x];
        for (std::size_t x = 0; x < w; ++x) env.run(buf.data() + x * h, h, w2);
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) plane[y * w + x] = buf[x * h + y];
    }
}

// For each y-row, transforms all x-columns along z.
void pass_z(std::vector<double>& data, std::size_t w, std::size_t h, std::size_t d, double w2) {
    if (d == 1) return;
    std::vector<double> buf(w * d);
    Envelope env(d);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t z = 0; z < d; ++z) {
            const double* row = data.data() + (z * h + y) * w;
            for (std::size_t x = 0; x < w; ++x) buf[x * d + z] = row[x];
        }
        for (std::size_t x = 0; x < w; ++x) env.run(buf.data() + x * d, d, w2);
        for (std::size_t z = 0; z < d; ++z) {
            double* row = data.data() + (z * h + y) * w;
            for (std::size_t x = 0; x < w; ++x) row[x] = buf[x * d + z];
        }
    }
}

}  // namespace

DistanceField::DistanceField(std::size_t width, std::size_t height, std::size_t depth, Spacing spacing,
                             std::vector<double> values)
    : width_(width), height_(height), depth_(depth), spacing_(spacing), values_(std::move(values)) {
    if (values_.size() != width_ * height_ * depth_) {
        throw InvalidShape("DistanceField: value count does not match dimensions");
    }
}

std::vector<double> squared_edt(const MaskVolume& volume) {
    const std::size_t w = volume.width();
    const std::size_t h = volume.height();
    const std::size_t d = volume.depth();
    const auto& sp = volume.spacing();
    std::vector<double> out(volume.size());
    pass_x(volume, out);
    if (h > 1) pass_y(out, w, h, d, sp.y * sp.y);
    pass_z(out, w, h, d, sp.z * sp.z);
    return out;
}

DistanceField edt3d(const MaskVolume& volume) {
    auto values = squared_edt(volume);
    for (auto& v : values) v = std::sqrt(v);
    return DistanceField(volume.width(), volume.height(), volume.depth(), volume.spacing(), std::move(values));
}

}  // namespace gitseg

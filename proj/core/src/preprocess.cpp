#include "gitseg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gitseg {

namespace {

// Working representation while a transform chain runs; wrapped back into
// validated types at the end.
struct Planes {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::vector<double>> images;
    PerClass<std::vector<std::uint8_t>> masks;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double lerp(double a, double b, double t) { return a + t * (b - a); }

// Bilinear read with zero outside the frame.
double sample_bilinear(const std::vector<double>& img, std::size_t w, std::size_t h, double sx, double sy) {
    const double fx0 = std::floor(sx);
    const double fy0 = std::floor(sy);
    const double tx = sx - fx0;
    const double ty = sy - fy0;
    const auto x0 = static_cast<long long>(fx0);
    const auto y0 = static_cast<long long>(fy0);
    const auto px = [&](long long x, long long y) -> double {
        if (x < 0 || y < 0 || x >= static_cast<long long>(w) || y >= static_cast<long long>(h)) return 0.0;
        return img[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)];
    };
    const double top = lerp(px(x0, y0), px(x0 + 1, y0), tx);
    const double bottom = lerp(px(x0, y0 + 1), px(x0 + 1, y0 + 1), tx);
    return clamp01(lerp(top, bottom, ty));
}

std::uint8_t sample_nearest(const std::vector<std::uint8_t>& mask, std::size_t w, std::size_t h, double sx,
                            double sy) {
    const double rx = std::floor(sx + 0.5);
    const double ry = std::floor(sy + 0.5);
    if (rx < 0.0 || ry < 0.0 || rx >= static_cast<double>(w) || ry >= static_cast<double>(h)) return 0;
    return mask[static_cast<std::size_t>(ry) * w + static_cast<std::size_t>(rx)];
}

// Backward warp: output pixel (x, y) reads the source at map(x, y).
template <typename Map>
void warp(Planes& p, Map&& map) {
    const std::size_t n = p.width * p.height;
    std::vector<double> src_x(n);
    std::vector<double> src_y(n);
    for (std::size_t y = 0; y < p.height; ++y) {
        for (std::size_t x = 0; x < p.width; ++x) {
            const auto [sx, sy] = map(static_cast<double>(x), static_cast<double>(y), y * p.width + x);
            src_x[y * p.width + x] = sx;
            src_y[y * p.width + x] = sy;
        }
    }
    for (auto& img : p.images) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = sample_bilinear(img, p.width, p.height, src_x[i], src_y[i]);
        img = std::move(out);
    }
    for (auto& mask : p.masks) {
        std::vector<std::uint8_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = sample_nearest(mask, p.width, p.height, src_x[i], src_y[i]);
        mask = std::move(out);
    }
}

std::vector<double> resize_bilinear(std::span<const double> src, std::size_t sw, std::size_t sh,
                                    std::size_t dw, std::size_t dh) {
    const double scale_x = static_cast<double>(sw) / static_cast<double>(dw);
    const double scale_y = static_cast<double>(sh) / static_cast<double>(dh);
    const double max_x = static_cast<double>(sw - 1);
    const double max_y = static_cast<double>(sh - 1);

    std::vector<std::size_t> x0(dw), x1(dw);
    std::vector<double> tx(dw);
    for (std::size_t x = 0; x < dw; ++x) {
        const double sx = std::clamp((static_cast<double>(x) + 0.5) * scale_x - 0.5, 0.0, max_x);
        x0[x] = static_cast<std::size_t>(sx);
        x1[x] = std::min(x0[x] + 1, sw - 1);
        tx[x] = sx - static_cast<double>(x0[x]);
    }
    std::vector<double> out(dw * dh);
    for (std::size_t y = 0; y < dh; ++y) {
        const double sy = std::clamp((static_cast<double>(y) + 0.5) * scale_y - 0.5, 0.0, max_y);
        const auto y0 = static_cast<std::size_t>(sy);
        const auto y1 = std::min(y0 + 1, sh - 1);
        const double ty = sy - static_cast<double>(y0);
        const double* r0 = src.data() + y0 * sw;
        const double* r1 = src.data() + y1 * sw;
        double* o = out.data() + y * dw;
        for (std::size_t x = 0; x < dw; ++x) {
            const double top = lerp(r0[x0[x]], r0[x1[x]], tx[x]);
            const double bottom = lerp(r1[x0[x]], r1[x1[x]], tx[x]);
            o[x] = clamp01(lerp(top, bottom, ty));
        }
    }
    return out;
}

std::vector<std::uint8_t> resize_nearest(std::span<const std::uint8_t> src, std::size_t sw, std::size_t sh,
                                         std::size_t dw, std::size_t dh) {
    // Source index of destination pixel d is floor((d + 0.5) * S / D).
    std::vector<std::size_t> xs(dw);
    for (std::size_t x = 0; x < dw; ++x) xs[x] = std::min((2 * x + 1) * sw / (2 * dw), sw - 1);
    std::vector<std::uint8_t> out(dw * dh);
    for (std::size_t y = 0; y < dh; ++y) {
        const std::size_t sy = std::min((2 * y + 1) * sh / (2 * dh), sh - 1);
        for (std::size_t x = 0; x < dw; ++x) out[y * dw + x] = src[sy * sw + xs[x]];
    }
    return out;
}

template <typename T>
void flip_rows(std::vector<T>& v, std::size_t w, std::size_t h) {
    for (std::size_t y = 0; y < h; ++y) std::reverse(v.begin() + static_cast<std::ptrdiff_t>(y * w),
                                                     v.begin() + static_cast<std::ptrdiff_t>((y + 1) * w));
}

void require_target(std::size_t width, std::size_t height, const char* what) {
    if (width == 0 || height == 0) {
        throw InvalidShape(std::string(what) + ": target dimensions must be >= 1");
    }
}

Planes to_planes(std::span<const NormalizedImage> images, const PerClass<BinaryMask>& masks) {
    Planes p;
    p.width = images.front().width();
    p.height = images.front().height();
    for (const auto& img : images) p.images.emplace_back(img.values().begin(), img.values().end());
    for (auto c : kOrganClasses) {
        const auto bits = masks[index_of(c)].bits();
        p.masks[index_of(c)].assign(bits.begin(), bits.end());
    }
    return p;
}

PerClass<BinaryMask> masks_of(const Planes& p) {
    return {BinaryMask(p.width, p.height, p.masks[0]), BinaryMask(p.width, p.height, p.masks[1]),
            BinaryMask(p.width, p.height, p.masks[2])};
}

Sample to_sample(const Planes& p, const SliceKey& key) {
    return Sample(NormalizedImage(p.width, p.height, p.images.front()), masks_of(p), key);
}

Planes planes_of(const Sample& s) { return to_planes(std::span(&s.image(), 1), s.masks()); }

void rotate_planes(Planes& p, double angle_deg) {
    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    const double cx = (static_cast<double>(p.width) - 1.0) / 2.0;
    const double cy = (static_cast<double>(p.height) - 1.0) / 2.0;
    warp(p, [&](double x, double y, std::size_t) {
        const double dx = x - cx;
        const double dy = y - cy;
        return std::pair{cx + c * dx - s * dy, cy + s * dx + c * dy};
    });
}

void elastic_planes(Planes& p, double alpha, double sigma, Rng& rng) {
    const auto field = make_displacement_field(p.width, p.height, alpha, sigma, rng);
    warp(p, [&](double x, double y, std::size_t i) { return std::pair{x + field.dx[i], y + field.dy[i]}; });
}

void zero_holes(std::vector<double>& v, std::size_t w, std::span<const Rect> holes) {
    for (const auto& r : holes)
        for (std::size_t y = r.y; y < r.y + r.height; ++y)
            std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(y * w + r.x), r.width, 0.0);
}

void zero_holes(std::vector<std::uint8_t>& v, std::size_t w, std::span<const Rect> holes) {
    for (const auto& r : holes)
        for (std::size_t y = r.y; y < r.y + r.height; ++y)
            std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(y * w + r.x), r.width, std::uint8_t{0});
}

void intensity_planes(std::vector<double>& v, double contrast, double brightness) {
    for (auto& x : v) x = clamp01(contrast * x + brightness);
}

// Shared by augment() and augment_stack().
void augment_planes(Planes& p, const SliceKey& key, const AugmentationSpec& spec) {
    validate(spec);
    const std::string id = to_id(key);
    const auto stream = [&](AugmentStage stage) {
        return make_stream(spec.seed, id, static_cast<std::uint64_t>(stage));
    };

    if (p.width != spec.target_width || p.height != spec.target_height) {
        for (auto& img : p.images)
            img = resize_bilinear(img, p.width, p.height, spec.target_width, spec.target_height);
        for (auto& m : p.masks)
            m = resize_nearest(m, p.width, p.height, spec.target_width, spec.target_height);
        p.width = spec.target_width;
        p.height = spec.target_height;
    }

    if (auto rng = stream(AugmentStage::Flip); rng.bernoulli(spec.hflip_prob)) {
        for (auto& img : p.images) flip_rows(img, p.width, p.height);
        for (auto& m : p.masks) flip_rows(m, p.width, p.height);
    }

    if (spec.rotate_max_deg > 0.0) {
        auto rng = stream(AugmentStage::Rotate);
        rotate_planes(p, rng.uniform(-spec.rotate_max_deg, spec.rotate_max_deg));
    }

    if (auto rng = stream(AugmentStage::Elastic); rng.bernoulli(spec.elastic_prob) && spec.elastic_alpha > 0.0) {
        elastic_planes(p, spec.elastic_alpha, spec.elastic_sigma, rng);
    }

    if (auto rng = stream(AugmentStage::Dropout); rng.bernoulli(spec.dropout_prob)) {
        const auto holes = draw_dropout_holes(p.width, p.height, spec, rng);
        for (auto& img : p.images) zero_holes(img, p.width, holes);
        if (spec.dropout_masks)
            for (auto& m : p.masks) zero_holes(m, p.width, holes);
    }

    if (auto rng = stream(AugmentStage::Intensity); rng.bernoulli(spec.intensity_prob)) {
        const double contrast = rng.uniform(spec.contrast_range.lo, spec.contrast_range.hi);
        const double brightness = rng.uniform(-spec.brightness_delta, spec.brightness_delta);
        for (auto& img : p.images) intensity_planes(img, contrast, brightness);
    }
}

std::vector<double> gaussian_kernel(double sigma) {
    const auto radius = static_cast<std::size_t>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double d = static_cast<double>(i) - static_cast<double>(radius);
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Separable convolution with replicated borders.
std::vector<double> smooth(const std::vector<double>& src, std::size_t w, std::size_t h,
                           const std::vector<double>& kernel) {
    const auto r = static_cast<long long>(kernel.size() / 2);
    const auto clampi = [](long long v, std::size_t n) {
        return static_cast<std::size_t>(std::clamp<long long>(v, 0, static_cast<long long>(n) - 1));
    };
    std::vector<double> tmp(src.size());
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (long long k = -r; k <= r; ++k)
                acc += kernel[static_cast<std::size_t>(k + r)] * src[y * w + clampi(static_cast<long long>(x) + k, w)];
            tmp[y * w + x] = acc;
        }
    }
    std::vector<double> out(src.size());
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (long long k = -r; k <= r; ++k)
                acc += kernel[static_cast<std::size_t>(k + r)] * tmp[clampi(static_cast<long long>(y) + k, h) * w + x];
            out[y * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

Sample::Sample(NormalizedImage image, PerClass<BinaryMask> masks, SliceKey key)
    : image_(std::move(image)), masks_(std::move(masks)), key_(std::move(key)) {
    for (const auto& m : masks_) {
        if (m.width() != image_.width() || m.height() != image_.height()) {
            throw ShapeMismatch("Sample: mask " + std::to_string(m.width()) + "x" + std::to_string(m.height()) +
                                " does not match image " + std::to_string(image_.width()) + "x" +
                                std::to_string(image_.height()));
        }
    }
}

Stack25::Stack25(std::array<NormalizedImage, 3> channels) : channels_(std::move(channels)) {
    for (const auto& c : channels_) {
        if (c.width() != channels_[0].width() || c.height() != channels_[0].height()) {
            throw ShapeMismatch("Stack25: channels must share one shape");
        }
    }
}

NormalizedImage normalize_intensity(const SliceImage& image) {
    const auto px = image.pixels();
    const auto [lo_it, hi_it] = std::minmax_element(px.begin(), px.end());
    const double lo = *lo_it;
    const double range = static_cast<double>(*hi_it) - lo;
    std::vector<double> out(px.size(), 0.0);
    if (range > 0.0) {
        for (std::size_t i = 0; i < px.size(); ++i) out[i] = clamp01((px[i] - lo) / range);
    }
    return NormalizedImage(image.width(), image.height(), std::move(out));
}

NormalizedImage resize_image(const NormalizedImage& image, std::size_t width, std::size_t height) {
    require_target(width, height, "resize_image");
    return NormalizedImage(width, height,
                           resize_bilinear(image.values(), image.width(), image.height(), width, height));
}

BinaryMask resize_mask(const BinaryMask& mask, std::size_t width, std::size_t height) {
    require_target(width, height, "resize_mask");
    return BinaryMask(width, height, resize_nearest(mask.bits(), mask.width(), mask.height(), width, height));
}

NormalizedImage hflip(const NormalizedImage& image) {
    std::vector<double> v(image.values().begin(), image.values().end());
    flip_rows(v, image.width(), image.height());
    return NormalizedImage(image.width(), image.height(), std::move(v));
}

BinaryMask hflip(const BinaryMask& mask) {
    std::vector<std::uint8_t> v(mask.bits().begin(), mask.bits().end());
    flip_rows(v, mask.width(), mask.height());
    return BinaryMask(mask.width(), mask.height(), std::move(v));
}

Sample hflip(const Sample& sample) {
    const auto& m = sample.masks();
    return Sample(hflip(sample.image()), {hflip(m[0]), hflip(m[1]), hflip(m[2])}, sample.key());
}

Sample rotate(const Sample& sample, double angle_deg) {
    if (!std::isfinite(angle_deg)) throw InvalidArgument("rotate: angle must be finite");
    auto p = planes_of(sample);
    rotate_planes(p, angle_deg);
    return to_sample(p, sample.key());
}

DisplacementField make_displacement_field(std::size_t width, std::size_t height, double alpha, double sigma,
                                          Rng& rng) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("elastic: alpha must be >= 0");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("elastic: sigma must be > 0");
    const std::size_t n = width * height;
    std::vector<double> nx(n), ny(n);
    for (auto& v : nx) v = rng.uniform(-1.0, 1.0);
    for (auto& v : ny) v = rng.uniform(-1.0, 1.0);
    const auto kernel = gaussian_kernel(sigma);
    DisplacementField f{width, height, smooth(nx, width, height, kernel), smooth(ny, width, height, kernel)};
    for (auto& v : f.dx) v = alpha * std::clamp(v, -1.0, 1.0);
    for (auto& v : f.dy) v = alpha * std::clamp(v, -1.0, 1.0);
    return f;
}

Sample elastic(const Sample& sample, double alpha, double sigma, Rng& rng) {
    auto p = planes_of(sample);
    elastic_planes(p, alpha, sigma, rng);
    return to_sample(p, sample.key());
}

std::vector<Rect> draw_dropout_holes(std::size_t width, std::size_t height, const AugmentationSpec& spec,
                                     Rng& rng) {
    const auto bounded = [](IntRange r, std::size_t limit) {
        return IntRange{std::min(r.lo, limit), std::min(r.hi, limit)};
    };
    const auto rw = bounded(spec.dropout_hole_w, width);
    const auto rh = bounded(spec.dropout_hole_h, height);
    std::vector<Rect> holes;
    holes.reserve(spec.dropout_holes);
    for (std::size_t i = 0; i < spec.dropout_holes; ++i) {
        Rect r;
        r.width = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(rw.lo), static_cast<std::int64_t>(rw.hi)));
        r.height = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(rh.lo), static_cast<std::int64_t>(rh.hi)));
        r.x = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(width - r.width)));
        r.y = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(height - r.height)));
        holes.push_back(r);
    }
    return holes;
}

NormalizedImage apply_holes(const NormalizedImage& image, std::span<const Rect> holes) {
    std::vector<double> v(image.values().begin(), image.values().end());
    for (const auto& r : holes) {
        if (r.x + r.width > image.width() || r.y + r.height > image.height())
            throw InvalidArgument("apply_holes: hole outside image");
    }
    zero_holes(v, image.width(), holes);
    return NormalizedImage(image.width(), image.height(), std::move(v));
}

BinaryMask apply_holes(const BinaryMask& mask, std::span<const Rect> holes) {
    std::vector<std::uint8_t> v(mask.bits().begin(), mask.bits().end());
    for (const auto& r : holes) {
        if (r.x + r.width > mask.width() || r.y + r.height > mask.height())
            throw InvalidArgument("apply_holes: hole outside mask");
    }
    zero_holes(v, mask.width(), holes);
    return BinaryMask(mask.width(), mask.height(), std::move(v));
}

NormalizedImage coarse_dropout(const NormalizedImage& image, const AugmentationSpec& spec, Rng& rng) {
    const auto holes = draw_dropout_holes(image.width(), image.height(), spec, rng);
    return apply_holes(image, holes);
}

NormalizedImage apply_intensity(const NormalizedImage& image, double contrast, double brightness) {
    std::vector<double> v(image.values().begin(), image.values().end());
    intensity_planes(v, contrast, brightness);
    return NormalizedImage(image.width(), image.height(), std::move(v));
}

NormalizedImage intensity_jitter(const NormalizedImage& image, const AugmentationSpec& spec, Rng& rng) {
    const double contrast = rng.uniform(spec.contrast_range.lo, spec.contrast_range.hi);
    const double brightness = rng.uniform(-spec.brightness_delta, spec.brightness_delta);
    return apply_intensity(image, contrast, brightness);
}

Sample augment(const Sample& sample, const AugmentationSpec& spec) {
    auto p = planes_of(sample);
    augment_planes(p, sample.key(), spec);
    return to_sample(p, sample.key());
}

AugmentedStack augment_stack(const Stack25& stack, const PerClass<BinaryMask>& masks, const SliceKey& key,
                             const AugmentationSpec& spec) {
    for (const auto& m : masks) {
        if (m.width() != stack.width() || m.height() != stack.height())
            throw ShapeMismatch("augment_stack: mask shape differs from stack shape");
    }
    auto p = to_planes(stack.channels(), masks);
    augment_planes(p, key, spec);
    return AugmentedStack{
        Stack25({NormalizedImage(p.width, p.height, p.images[0]), NormalizedImage(p.width, p.height, p.images[1]),
                 NormalizedImage(p.width, p.height, p.images[2])}),
        masks_of(p)};
}

Stack25 stack_25d(std::span<const NormalizedImage> volume, std::size_t index) {
    if (index >= volume.size()) {
        throw InvalidArgument("stack_25d: index " + std::to_string(index) + " outside volume of depth " +
                              std::to_string(volume.size()));
    }
    for (const auto& slice : volume) {
        if (slice.width() != volume[0].width() || slice.height() != volume[0].height())
            throw ShapeMismatch("stack_25d: volume slices differ in shape");
    }
    const std::size_t prev = index == 0 ? 0 : index - 1;
    const std::size_t next = std::min(index + 1, volume.size() - 1);
    return Stack25({volume[prev], volume[index], volume[next]});
}

}  // namespace gitseg

#include "swiim/ops.hpp"

#include "swiim/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace swiim {

namespace {

std::string rect_text(std::uint64_t x, std::uint64_t y, std::uint64_t w, std::uint64_t h) {
    return "(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(w) + "," +
           std::to_string(h) + ")";
}

void require_range(double v, double lo, double hi, const char* name) {
    if (!(v >= lo && v <= hi)) {
        throw Error(ErrorCode::ParamOutOfRange, std::string(name) + " = " + std::to_string(v) +
                                                    " outside [" + std::to_string(lo) + ", " +
                                                    std::to_string(hi) + "]");
    }
}

// Applies a 256-entry lookup per color channel; alpha is copied.
Raster map_channels(const Raster& img, const std::array<std::array<std::uint8_t, 256>, 3>& lut) {
    Raster out = img;
    auto px = out.bytes();
    for (std::size_t i = 0; i < px.size(); i += Raster::kChannels) {
        px[i] = lut[0][px[i]];
        px[i + 1] = lut[1][px[i + 1]];
        px[i + 2] = lut[2][px[i + 2]];
    }
    return out;
}

struct Hsl {
    double h;
    double s;
    double l;
};

Hsl to_hsl(double r, double g, double b) {
    const double hi = std::max({r, g, b});
    const double lo = std::min({r, g, b});
    const double l = (hi + lo) / 2.0;
    if (hi == lo) return {0.0, 0.0, l};

    const double d = hi - lo;
    const double s = l > 0.5 ? d / (2.0 - hi - lo) : d / (hi + lo);
    double h;
    if (hi == r) {
        h = (g - b) / d + (g < b ? 6.0 : 0.0);
    } else if (hi == g) {
        h = (b - r) / d + 2.0;
    } else {
        h = (r - g) / d + 4.0;
    }
    return {h * 60.0, s, l};
}

double hue_to_channel(double p, double q, double t) {
    if (t < 0.0) t += 1.0;
    if (t > 1.0) t -= 1.0;
    if (t < 1.0 / 6.0) return p + (q - p) * 6.0 * t;
    if (t < 0.5) return q;
    if (t < 2.0 / 3.0) return p + (q - p) * (2.0 / 3.0 - t) * 6.0;
    return p;
}

} // namespace

std::uint8_t quantize_unit(double v) noexcept {
    const double clamped = std::clamp(v, 0.0, 1.0);
    // std::round rounds half away from zero.
    return static_cast<std::uint8_t>(std::round(clamped * 255.0));
}

Raster crop(const Raster& img, const PixelRect& rect) {
    if (rect.w == 0 || rect.h == 0) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "crop rectangle " + rect_text(rect.x, rect.y, rect.w, rect.h) + " is empty");
    }
    const std::uint64_t right = std::uint64_t{rect.x} + rect.w;
    const std::uint64_t bottom = std::uint64_t{rect.y} + rect.h;
    if (right > img.width() || bottom > img.height()) {
        throw Error(ErrorCode::OutOfBounds,
                    "crop rectangle " + rect_text(rect.x, rect.y, rect.w, rect.h) +
                        " reaches (" + std::to_string(right) + "," + std::to_string(bottom) +
                        ") beyond image " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()));
    }

    Raster out(rect.w, rect.h);
    const std::size_t row_bytes = std::size_t{rect.w} * Raster::kChannels;
    auto src = img.bytes();
    auto dst = out.bytes();
    for (std::uint32_t y = 0; y < rect.h; ++y) {
        const std::size_t from =
            ((std::size_t{rect.y} + y) * img.width() + rect.x) * Raster::kChannels;
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), row_bytes,
                    dst.begin() + static_cast<std::ptrdiff_t>(y * row_bytes));
    }
    return out;
}

Raster rotate(const Raster& img, int quarter_turns) {
    if (quarter_turns < 1 || quarter_turns > 3) {
        throw Error(ErrorCode::InvalidAngle, "rotation must be 1, 2 or 3 clockwise quarter turns, got " +
                                                 std::to_string(quarter_turns));
    }
    const std::uint32_t w = img.width();
    const std::uint32_t h = img.height();

    if (quarter_turns == 2) {
        Raster out(w, h);
        for (std::uint32_t y = 0; y < h; ++y)
            for (std::uint32_t x = 0; x < w; ++x) out.set(x, y, img.at(w - 1 - x, h - 1 - y));
        return out;
    }

    Raster out(h, w);
    for (std::uint32_t yo = 0; yo < w; ++yo) {
        for (std::uint32_t xo = 0; xo < h; ++xo) {
            // 90 CW: out(xo, yo) = in(yo, H-1-xo); 270 CW: out(xo, yo) = in(W-1-yo, xo).
            const Rgba c = quarter_turns == 1 ? img.at(yo, h - 1 - xo) : img.at(w - 1 - yo, xo);
            out.set(xo, yo, c);
        }
    }
    return out;
}

Raster flip(const Raster& img, FlipAxis axis) {
    const std::uint32_t w = img.width();
    const std::uint32_t h = img.height();
    Raster out(w, h);
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            out.set(x, y,
                    axis == FlipAxis::Horizontal ? img.at(w - 1 - x, y) : img.at(x, h - 1 - y));
        }
    }
    return out;
}

Raster brightness_contrast(const Raster& img, const ToneParams& p) {
    require_range(p.brightness, -1.0, 1.0, "brightness");
    if (!(p.contrast > -1.0 && p.contrast < 1.0)) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "contrast = " + std::to_string(p.contrast) + " outside (-1, 1)");
    }
    const double slope = std::tan((p.contrast + 1.0) * std::numbers::pi / 4.0);

    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) {
        const double v01 = v / 255.0;
        lut[v] = quantize_unit((v01 - 0.5) * slope + 0.5 + p.brightness);
    }
    return map_channels(img, {lut, lut, lut});
}

Raster color_balance(const Raster& img, const ChannelGains& g) {
    require_range(g.r_gain, 0.0, 4.0, "r_gain");
    require_range(g.g_gain, 0.0, 4.0, "g_gain");
    require_range(g.b_gain, 0.0, 4.0, "b_gain");

    std::array<std::array<std::uint8_t, 256>, 3> lut{};
    const std::array<double, 3> gains{g.r_gain, g.g_gain, g.b_gain};
    for (std::size_t c = 0; c < 3; ++c)
        for (int v = 0; v < 256; ++v) lut[c][v] = quantize_unit(v / 255.0 * gains[c]);
    return map_channels(img, lut);
}

Raster hue_rotate(const Raster& img, const HueShift& shift) {
    if (!std::isfinite(shift.degrees)) {
        throw Error(ErrorCode::ParamOutOfRange, "hue shift must be finite");
    }
    double deg = std::fmod(shift.degrees, 360.0);
    if (deg < 0.0) deg += 360.0;
    if (deg == 0.0 || deg == 360.0) return img;

    Raster out = img;
    auto px = out.bytes();
    for (std::size_t i = 0; i < px.size(); i += Raster::kChannels) {
        Hsl hsl = to_hsl(px[i] / 255.0, px[i + 1] / 255.0, px[i + 2] / 255.0);
        if (hsl.s == 0.0) continue; // achromatic pixels have no hue to rotate

        double hue = std::fmod(hsl.h + deg, 360.0) / 360.0;
        const double q = hsl.l < 0.5 ? hsl.l * (1.0 + hsl.s) : hsl.l + hsl.s - hsl.l * hsl.s;
        const double p = 2.0 * hsl.l - q;
        px[i] = quantize_unit(hue_to_channel(p, q, hue + 1.0 / 3.0));
        px[i + 1] = quantize_unit(hue_to_channel(p, q, hue));
        px[i + 2] = quantize_unit(hue_to_channel(p, q, hue - 1.0 / 3.0));
    }
    return out;
}

Raster threshold(const Raster& img, double t) {
    require_range(t, 0.0, 1.0, "threshold");
    // One correctly rounded division per side: ties against six-digit
    // thresholds resolve exactly.
    Raster out = img;
    auto px = out.bytes();
    for (std::size_t i = 0; i < px.size(); i += Raster::kChannels) {
        const int luma1000 = 299 * px[i] + 587 * px[i + 1] + 114 * px[i + 2];
        const std::uint8_t v = luma1000 / 255000.0 >= t ? 255 : 0;
        px[i] = px[i + 1] = px[i + 2] = v;
    }
    return out;
}

Raster equalize_histogram(const Raster& img) {
    const std::uint64_t n = img.pixel_count();
    auto px = img.bytes();

    std::array<std::array<std::uint8_t, 256>, 3> lut{};
    for (std::size_t c = 0; c < 3; ++c) {
        std::array<std::uint64_t, 256> hist{};
        for (std::size_t i = c; i < px.size(); i += Raster::kChannels) ++hist[px[i]];

        for (int v = 0; v < 256; ++v) lut[c][v] = static_cast<std::uint8_t>(v);

        int top = 255;
        while (hist[top] == 0) --top;
        const std::uint64_t denom = n - hist[top];
        if (denom == 0) continue; // constant channel stays as is

        // map(v) = round(255 * #{pixels < v} / (N - #{pixels at max})), evaluated exactly.
        std::uint64_t below = 0;
        for (int v = 0; v < 256; ++v) {
            if (hist[v] != 0) {
                lut[c][v] = static_cast<std::uint8_t>((2 * 255 * below + denom) / (2 * denom));
            }
            below += hist[v];
        }
    }
    return map_channels(img, lut);
}

Raster meld(const Raster& base, const Raster& insert, const MeldSpec& spec) {
    const std::uint64_t bw = spec.border_width;
    const std::uint64_t right = std::uint64_t{spec.x} + insert.width() + bw;
    const std::uint64_t bottom = std::uint64_t{spec.y} + insert.height() + bw;
    if (spec.x < bw || spec.y < bw || right > base.width() || bottom > base.height()) {
        const std::int64_t fx = static_cast<std::int64_t>(spec.x) - static_cast<std::int64_t>(bw);
        const std::int64_t fy = static_cast<std::int64_t>(spec.y) - static_cast<std::int64_t>(bw);
        throw Error(ErrorCode::OutOfBounds,
                    "framed insert spans (" + std::to_string(fx) + "," + std::to_string(fy) +
                        ")-(" + std::to_string(right) + "," + std::to_string(bottom) +
                        ") outside base " + std::to_string(base.width()) + "x" +
                        std::to_string(base.height()));
    }

    Raster out = base;
    const std::uint32_t fx0 = static_cast<std::uint32_t>(spec.x - bw);
    const std::uint32_t fy0 = static_cast<std::uint32_t>(spec.y - bw);
    for (std::uint32_t y = fy0; y < bottom; ++y) {
        for (std::uint32_t x = fx0; x < right; ++x) {
            const bool inside = x >= spec.x && x < spec.x + insert.width() && y >= spec.y &&
                                y < spec.y + insert.height();
            out.set(x, y, inside ? insert.at(x - spec.x, y - spec.y) : spec.border_color);
        }
    }
    return out;
}

} // namespace swiim

#pragma once

// The scientific editing set. Every function here is pure and total over its
// documented domain: same inputs give bit-identical outputs, and invalid
// parameters raise swiim::Error before any pixel is touched.

#include "swiim/raster.hpp"

#include <cstdint>

namespace swiim {

struct PixelRect {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t w = 1;
    std::uint32_t h = 1;

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// brightness in [-1, 1], contrast in (-1, 1). (0, 0) is the identity.
struct ToneParams {
    double brightness = 0.0;
    double contrast = 0.0;
};

/// Per-channel multipliers in [0, 4].
struct ChannelGains {
    double r_gain = 1.0;
    double g_gain = 1.0;
    double b_gain = 1.0;
};

/// Hue rotation angle in degrees, taken modulo 360.
struct HueShift {
    double degrees = 0.0;
};

enum class FlipAxis { Horizontal, Vertical };

/// Placement for meld: the insert's top-left lands at (x, y); the border
/// frame extends border_width pixels beyond it on every side.
struct MeldSpec {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t border_width = 0;
    Rgba border_color{0, 0, 0, 255};
};

Raster crop(const Raster& img, const PixelRect& rect);

/// Clockwise quarter turns; anything but 1, 2, 3 is InvalidAngle.
Raster rotate(const Raster& img, int quarter_turns);

Raster flip(const Raster& img, FlipAxis axis);

Raster brightness_contrast(const Raster& img, const ToneParams& p);

Raster color_balance(const Raster& img, const ChannelGains& g);

Raster hue_rotate(const Raster& img, const HueShift& h);

/// RGB becomes white where Rec.601 luma >= t*255, black elsewhere. t in [0, 1].
Raster threshold(const Raster& img, double t);

Raster equalize_histogram(const Raster& img);

Raster meld(const Raster& base, const Raster& insert, const MeldSpec& spec);

/// Round half away from zero of clamp01(v) * 255. Shared by every tone op.
std::uint8_t quantize_unit(double v) noexcept;

} // namespace swiim

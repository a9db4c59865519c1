#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace swiim {

struct Rgba {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    std::uint8_t a = 255;

    friend auto operator<=>(const Rgba&, const Rgba&) = default;
};

/// Canonical in-memory image: row-major RGBA8, width and height >= 1.
/// Every codec decodes into this and every operation maps Raster -> Raster.
class Raster {
public:
    static constexpr std::size_t kChannels = 4;

    Raster(std::uint32_t width, std::uint32_t height, Rgba fill = {});
    /// Throws ParamOutOfRange if the buffer is not width*height*4 bytes.
    Raster(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> rgba);

    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * height_;
    }

    std::span<const std::uint8_t> bytes() const noexcept { return pixels_; }
    std::span<std::uint8_t> bytes() noexcept { return pixels_; }

    Rgba at(std::uint32_t x, std::uint32_t y) const noexcept {
        const std::uint8_t* p = &pixels_[offset(x, y)];
        return {p[0], p[1], p[2], p[3]};
    }
    void set(std::uint32_t x, std::uint32_t y, Rgba c) noexcept {
        std::uint8_t* p = &pixels_[offset(x, y)];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
        p[3] = c.a;
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t offset(std::uint32_t x, std::uint32_t y) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * kChannels;
    }

    std::uint32_t width_;
    std::uint32_t height_;
    std::vector<std::uint8_t> pixels_;
};

} // namespace swiim

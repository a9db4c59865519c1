#include "swiim/raster.hpp"

#include "swiim/error.hpp"

#include <string>

namespace swiim {

namespace {

std::size_t checked_size(std::uint32_t width, std::uint32_t height) {
    if (width == 0 || height == 0) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "raster dimensions must be at least 1x1, got " + std::to_string(width) +
                        "x" + std::to_string(height));
    }
    return static_cast<std::size_t>(width) * height * Raster::kChannels;
}

} // namespace

Raster::Raster(std::uint32_t width, std::uint32_t height, Rgba fill)
    : width_(width), height_(height), pixels_(checked_size(width, height)) {
    for (std::size_t i = 0; i < pixels_.size(); i += kChannels) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
        pixels_[i + 3] = fill.a;
    }
}

Raster::Raster(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> rgba)
    : width_(width), height_(height), pixels_(std::move(rgba)) {
    const std::size_t expected = checked_size(width, height);
    if (pixels_.size() != expected) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "pixel buffer holds " + std::to_string(pixels_.size()) + " bytes, expected " +
                        std::to_string(expected));
    }
}

} // namespace swiim

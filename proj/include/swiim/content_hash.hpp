#pragma once

#include "swiim/raster.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace swiim {

/// SHA-256 over the canonical pixel serialization of a raster:
/// 4-byte big-endian width, 4-byte big-endian height, then the RGBA8 buffer.
/// Identity of "the image" independent of the file format it came from.
class ContentHash {
public:
    using Digest = std::array<std::uint8_t, 32>;

    ContentHash() = default;
    explicit ContentHash(const Digest& digest) : digest_(digest) {}

    static ContentHash of(const Raster& raster);
    /// Accepts exactly 64 lowercase hex characters.
    static std::optional<ContentHash> from_hex(std::string_view hex);

    const Digest& digest() const noexcept { return digest_; }
    std::string hex() const;
    /// First 8 hex characters, used in report renderings.
    std::string short_hex() const { return hex().substr(0, 8); }

    friend auto operator<=>(const ContentHash&, const ContentHash&) = default;

private:
    Digest digest_{};
};

inline ContentHash content_hash(const Raster& raster) { return ContentHash::of(raster); }

} // namespace swiim

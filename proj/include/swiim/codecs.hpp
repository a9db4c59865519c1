#pragma once

#include "swiim/raster.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swiim {

enum class ImageFormat { Png, Jpeg, Bmp, Tiff };

inline constexpr int kDefaultJpegQuality = 95;

/// Canonical names as they appear in journals: "png", "jpg", "bmp", "tiff".
std::string_view to_string(ImageFormat format);
/// Strict: canonical names only.
std::optional<ImageFormat> format_from_name(std::string_view name);
/// Lenient: also accepts "jpeg", "tif" and upper case, for user input.
std::optional<ImageFormat> format_from_user_text(std::string_view text);
/// Guesses from a file extension; nullopt when unknown.
std::optional<ImageFormat> format_from_extension(std::string_view path);

std::string_view mime_type(ImageFormat format);

struct ImportResult {
    Raster raster;
    ImageFormat format;
    std::vector<std::string> warnings;
};

/// Largest width or height any decoder will accept.
inline constexpr std::uint32_t kMaxDimension = 1u << 15;

/// Detects the format from magic bytes. `declared` is only cross-checked and
/// raises FormatMismatch when it disagrees.
ImportResult import_image(std::span<const std::uint8_t> bytes,
                          std::optional<ImageFormat> declared = std::nullopt);

std::optional<ImageFormat> detect_format(std::span<const std::uint8_t> bytes);

/// png, bmp and tiff are lossless. `quality` is used by jpg only and must be
/// in 1..100 there.
std::vector<std::uint8_t> export_image(const Raster& raster, ImageFormat format,
                                       int quality = kDefaultJpegQuality);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

namespace codec {

// Format-specific entry points used by import_image/export_image.
ImportResult decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Raster& raster);

ImportResult decode_jpeg(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_jpeg(const Raster& raster, int quality);

ImportResult decode_bmp(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_bmp(const Raster& raster);

ImportResult decode_tiff(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_tiff(const Raster& raster);

void check_dimensions(std::uint64_t width, std::uint64_t height, std::string_view format);

} // namespace codec

} // namespace swiim

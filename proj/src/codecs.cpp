#include "swiim/codecs.hpp"

#include "swiim/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

namespace swiim {

std::string_view to_string(ImageFormat format) {
    switch (format) {
    case ImageFormat::Png: return "png";
    case ImageFormat::Jpeg: return "jpg";
    case ImageFormat::Bmp: return "bmp";
    case ImageFormat::Tiff: return "tiff";
    }
    return "?";
}

std::optional<ImageFormat> format_from_name(std::string_view name) {
    if (name == "png") return ImageFormat::Png;
    if (name == "jpg") return ImageFormat::Jpeg;
    if (name == "bmp") return ImageFormat::Bmp;
    if (name == "tiff") return ImageFormat::Tiff;
    return std::nullopt;
}

std::optional<ImageFormat> format_from_user_text(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "jpeg") return ImageFormat::Jpeg;
    if (lower == "tif") return ImageFormat::Tiff;
    return format_from_name(lower);
}

std::optional<ImageFormat> format_from_extension(std::string_view path) {
    const auto dot = path.rfind('.');
    if (dot == std::string_view::npos) return std::nullopt;
    return format_from_user_text(path.substr(dot + 1));
}

std::string_view mime_type(ImageFormat format) {
    switch (format) {
    case ImageFormat::Png: return "image/png";
    case ImageFormat::Jpeg: return "image/jpeg";
    case ImageFormat::Bmp: return "image/bmp";
    case ImageFormat::Tiff: return "image/tiff";
    }
    return "application/octet-stream";
}

std::optional<ImageFormat> detect_format(std::span<const std::uint8_t> b) {
    auto starts = [&](std::initializer_list<std::uint8_t> magic) {
        return b.size() >= magic.size() && std::equal(magic.begin(), magic.end(), b.begin());
    };
    if (starts({0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a})) return ImageFormat::Png;
    if (starts({0xff, 0xd8, 0xff})) return ImageFormat::Jpeg;
    if (starts({'B', 'M'})) return ImageFormat::Bmp;
    if (starts({'I', 'I', 42, 0}) || starts({'M', 'M', 0, 42})) return ImageFormat::Tiff;
    return std::nullopt;
}

ImportResult import_image(std::span<const std::uint8_t> bytes, std::optional<ImageFormat> declared) {
    const auto detected = detect_format(bytes);
    if (!detected) {
        std::string what = "not a png, jpg, bmp or tiff file";
        if (bytes.size() >= 4 && bytes[0] == 'G' && bytes[1] == 'I' && bytes[2] == 'F') {
            what = "GIF images are not supported";
        } else if (bytes.empty()) {
            what = "empty input";
        }
        throw Error(ErrorCode::UnsupportedFormat, what);
    }
    if (declared && *declared != *detected) {
        throw Error(ErrorCode::FormatMismatch, "declared " + std::string(to_string(*declared)) +
                                                   " but content is " +
                                                   std::string(to_string(*detected)));
    }
    switch (*detected) {
    case ImageFormat::Png: return codec::decode_png(bytes);
    case ImageFormat::Jpeg: return codec::decode_jpeg(bytes);
    case ImageFormat::Bmp: return codec::decode_bmp(bytes);
    case ImageFormat::Tiff: return codec::decode_tiff(bytes);
    }
    throw Error(ErrorCode::UnsupportedFormat, "unknown format");
}

std::vector<std::uint8_t> export_image(const Raster& raster, ImageFormat format, int quality) {
    switch (format) {
    case ImageFormat::Png: return codec::encode_png(raster);
    case ImageFormat::Jpeg: return codec::encode_jpeg(raster, quality);
    case ImageFormat::Bmp: return codec::encode_bmp(raster);
    case ImageFormat::Tiff: return codec::encode_tiff(raster);
    }
    throw Error(ErrorCode::UnsupportedFormat, "unknown format");
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed: " + path);
    return data;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot create " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

namespace codec {

void check_dimensions(std::uint64_t width, std::uint64_t height, std::string_view format) {
    if (width == 0 || height == 0 || width > kMaxDimension || height > kMaxDimension) {
        throw Error(ErrorCode::CorruptFile, std::string(format) + " dimensions " +
                                                std::to_string(width) + "x" +
                                                std::to_string(height) + " out of range");
    }
}

} // namespace codec

} // namespace swiim

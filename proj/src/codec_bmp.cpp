#include "swiim/codecs.hpp"
#include "swiim/error.hpp"

#include <array>
#include <bit>

namespace swiim::codec {

namespace {

constexpr std::uint32_t kBiRgb = 0;
constexpr std::uint32_t kBiBitfields = 3;
constexpr std::uint32_t kBiAlphaBitfields = 6;

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint32_t u8(std::size_t at) const { return need(at, 1), data_[at]; }
    std::uint32_t u16(std::size_t at) const {
        need(at, 2);
        return data_[at] | data_[at + 1] << 8;
    }
    std::uint32_t u32(std::size_t at) const {
        need(at, 4);
        return std::uint32_t{data_[at]} | std::uint32_t{data_[at + 1]} << 8 |
               std::uint32_t{data_[at + 2]} << 16 | std::uint32_t{data_[at + 3]} << 24;
    }
    std::int32_t i32(std::size_t at) const { return static_cast<std::int32_t>(u32(at)); }

    void need(std::size_t at, std::size_t n) const {
        if (at > data_.size() || n > data_.size() - at)
            throw Error(ErrorCode::CorruptFile, "bmp: truncated at byte " + std::to_string(at));
    }

private:
    std::span<const std::uint8_t> data_;
};

struct Channel {
    std::uint32_t mask = 0;
    int shift = 0;
    std::uint32_t max = 0;

    explicit Channel(std::uint32_t m = 0) : mask(m) {
        if (mask == 0) return;
        shift = std::countr_zero(mask);
        max = mask >> shift;
    }
    std::uint8_t extract(std::uint32_t v) const {
        if (mask == 0) return 0;
        const std::uint32_t raw = (v & mask) >> shift;
        if (max == 255) return static_cast<std::uint8_t>(raw);
        return static_cast<std::uint8_t>((std::uint64_t{raw} * 255 + max / 2) / max);
    }
};

void put16(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    put16(out, v & 0xffff);
    put16(out, v >> 16);
}

} // namespace

ImportResult decode_bmp(std::span<const std::uint8_t> bytes) {
    const Reader rd(bytes);
    const std::uint32_t pixel_offset = rd.u32(10);
    const std::uint32_t header_size = rd.u32(14);

    std::int64_t width = 0;
    std::int64_t height = 0;
    std::uint32_t bpp = 0;
    std::uint32_t compression = kBiRgb;
    std::uint32_t colors_used = 0;
    std::size_t palette_entry = 4;
    std::array<std::uint32_t, 4> masks{};
    bool has_masks = false;

    if (header_size == 12) {
        width = rd.u16(18);
        height = static_cast<std::int16_t>(rd.u16(20));
        bpp = rd.u16(24);
        palette_entry = 3;
    } else if (header_size >= 40) {
        width = rd.i32(18);
        height = rd.i32(22);
        bpp = rd.u16(28);
        compression = rd.u32(30);
        colors_used = rd.u32(46);
        if (compression == kBiBitfields || compression == kBiAlphaBitfields) {
            has_masks = true;
            masks[0] = rd.u32(54);
            masks[1] = rd.u32(58);
            masks[2] = rd.u32(62);
            if (header_size >= 56 || compression == kBiAlphaBitfields) masks[3] = rd.u32(66);
        }
    } else {
        throw Error(ErrorCode::CorruptFile, "bmp: unknown header size " + std::to_string(header_size));
    }

    if (compression != kBiRgb && compression != kBiBitfields && compression != kBiAlphaBitfields) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "bmp: compression type " + std::to_string(compression) + " is not supported");
    }
    const bool top_down = height < 0;
    if (top_down) height = -height;
    check_dimensions(width < 0 ? 0 : static_cast<std::uint64_t>(width),
                     static_cast<std::uint64_t>(height), "bmp");
    const auto w = static_cast<std::uint32_t>(width);
    const auto h = static_cast<std::uint32_t>(height);

    if (bpp != 1 && bpp != 4 && bpp != 8 && bpp != 16 && bpp != 24 && bpp != 32)
        throw Error(ErrorCode::UnsupportedFormat, "bmp: " + std::to_string(bpp) + " bits per pixel");
    if (has_masks && bpp != 16 && bpp != 32)
        throw Error(ErrorCode::CorruptFile, "bmp: bitfields require 16 or 32 bits per pixel");

    std::vector<Rgba> palette;
    if (bpp <= 8) {
        std::size_t count = colors_used ? colors_used : (std::size_t{1} << bpp);
        if (count > 256) throw Error(ErrorCode::CorruptFile, "bmp: palette larger than 256 entries");
        std::size_t at = 14 + header_size + (has_masks && header_size == 40 ? 12 : 0);
        rd.need(at, count * palette_entry);
        for (std::size_t i = 0; i < count; ++i, at += palette_entry) {
            palette.push_back({static_cast<std::uint8_t>(rd.u8(at + 2)),
                               static_cast<std::uint8_t>(rd.u8(at + 1)),
                               static_cast<std::uint8_t>(rd.u8(at)), 255});
        }
    }
    if (!has_masks && bpp == 16) {
        masks = {0x7c00, 0x03e0, 0x001f, 0};
        has_masks = true;
    }

    const std::size_t stride = (std::size_t{bpp} * w + 31) / 32 * 4;
    rd.need(pixel_offset, stride * h);

    std::vector<std::uint8_t> rgba(std::size_t{w} * h * 4);
    const Channel cr(masks[0]), cg(masks[1]), cb(masks[2]), ca(masks[3]);
    bool any_alpha = false;

    for (std::uint32_t row = 0; row < h; ++row) {
        const std::uint32_t y = top_down ? row : h - 1 - row;
        const std::size_t line = pixel_offset + std::size_t{row} * stride;
        for (std::uint32_t x = 0; x < w; ++x) {
            Rgba c;
            if (bpp <= 8) {
                const std::size_t bit = std::size_t{x} * bpp;
                const std::uint32_t byte = bytes[line + bit / 8];
                const std::uint32_t idx = (byte >> (8 - bpp - bit % 8)) & ((1u << bpp) - 1);
                if (idx >= palette.size())
                    throw Error(ErrorCode::CorruptFile, "bmp: palette index out of range");
                c = palette[idx];
            } else if (bpp == 24) {
                const std::size_t p = line + std::size_t{x} * 3;
                c = {bytes[p + 2], bytes[p + 1], bytes[p], 255};
            } else {
                const std::size_t p = line + std::size_t{x} * (bpp / 8);
                const std::uint32_t v = bpp == 16 ? rd.u16(p) : rd.u32(p);
                if (has_masks) {
                    c = {cr.extract(v), cg.extract(v), cb.extract(v),
                         masks[3] ? ca.extract(v) : std::uint8_t{255}};
                } else {
                    c = {bytes[p + 2], bytes[p + 1], bytes[p], bytes[p + 3]};
                    any_alpha = any_alpha || c.a != 0;
                }
            }
            std::uint8_t* out = &rgba[(std::size_t{y} * w + x) * 4];
            out[0] = c.r;
            out[1] = c.g;
            out[2] = c.b;
            out[3] = c.a;
        }
    }

    ImportResult result{Raster(w, h, std::move(rgba)), ImageFormat::Bmp, {}};
    if (bpp == 32 && !has_masks && !any_alpha) {
        // Plain 32-bit BI_RGB files usually leave the fourth byte zero.
        auto px = result.raster.bytes();
        for (std::size_t i = 3; i < px.size(); i += 4) px[i] = 255;
    }
    return result;
}

std::vector<std::uint8_t> encode_bmp(const Raster& raster) {
    constexpr std::uint32_t kHeader = 108; // BITMAPV4HEADER, carries the alpha mask
    const std::uint64_t image_size = std::uint64_t{raster.pixel_count()} * 4;
    if (image_size + 14 + kHeader > 0xffffffffu)
        throw Error(ErrorCode::EncodeError, "bmp: image too large");

    std::vector<std::uint8_t> out;
    out.reserve(14 + kHeader + image_size);
    out.push_back('B');
    out.push_back('M');
    put32(out, static_cast<std::uint32_t>(14 + kHeader + image_size));
    put32(out, 0);
    put32(out, 14 + kHeader);

    put32(out, kHeader);
    put32(out, raster.width());
    put32(out, raster.height()); // bottom-up
    put16(out, 1);
    put16(out, 32);
    put32(out, kBiBitfields);
    put32(out, static_cast<std::uint32_t>(image_size));
    put32(out, 2835);
    put32(out, 2835);
    put32(out, 0);
    put32(out, 0);
    put32(out, 0x00ff0000);
    put32(out, 0x0000ff00);
    put32(out, 0x000000ff);
    put32(out, 0xff000000);
    put32(out, 0x73524742); // 'sRGB'
    for (int i = 0; i < 12; ++i) put32(out, 0); // endpoints + gamma

    for (std::uint32_t row = 0; row < raster.height(); ++row) {
        const std::uint32_t y = raster.height() - 1 - row;
        for (std::uint32_t x = 0; x < raster.width(); ++x) {
            const Rgba c = raster.at(x, y);
            out.push_back(c.b);
            out.push_back(c.g);
            out.push_back(c.r);
            out.push_back(c.a);
        }
    }
    return out;
}

} // namespace swiim::codec

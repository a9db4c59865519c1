#include "swiim/codecs.hpp"
#include "swiim/error.hpp"

#include <algorithm>
#include <map>

// Baseline TIFF: one image, uncompressed, chunky 8-bit (or 16-bit, reduced)
// strips. Tiles, compression and planar layouts are rejected.

namespace swiim::codec {

namespace {

enum Tag : std::uint16_t {
    kImageWidth = 256,
    kImageLength = 257,
    kBitsPerSample = 258,
    kCompression = 259,
    kPhotometric = 262,
    kImageDescription = 270,
    kMake = 271,
    kStripOffsets = 273,
    kSamplesPerPixel = 277,
    kRowsPerStrip = 278,
    kStripByteCounts = 279,
    kPlanarConfig = 284,
    kSoftware = 305,
    kDateTime = 306,
    kColorMap = 320,
    kTileWidth = 322,
    kExtraSamples = 338,
    kSampleFormat = 339,
    kXmp = 700,
    kExif = 34665,
    kIcc = 34675,
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> data, bool big_endian) : data_(data), big_(big_endian) {}

    std::uint32_t u16(std::size_t at) const {
        need(at, 2);
        return big_ ? (data_[at] << 8 | data_[at + 1]) : (data_[at] | data_[at + 1] << 8);
    }
    std::uint32_t u32(std::size_t at) const {
        need(at, 4);
        const std::uint32_t a = data_[at], b = data_[at + 1], c = data_[at + 2], d = data_[at + 3];
        return big_ ? (a << 24 | b << 16 | c << 8 | d) : (d << 24 | c << 16 | b << 8 | a);
    }
    void need(std::size_t at, std::size_t n) const {
        if (at > data_.size() || n > data_.size() - at)
            throw Error(ErrorCode::CorruptFile, "tiff: reference beyond end of file at byte " +
                                                    std::to_string(at));
    }
    bool big_endian() const { return big_; }
    std::span<const std::uint8_t> data() const { return data_; }

private:
    std::span<const std::uint8_t> data_;
    bool big_;
};

std::size_t type_size(std::uint32_t type) {
    switch (type) {
    case 1: case 2: case 6: case 7: return 1;
    case 3: case 8: return 2;
    case 4: case 9: case 11: return 4;
    case 5: case 10: case 12: return 8;
    default: return 0;
    }
}

// Reads BYTE/SHORT/LONG entries as integers.
std::vector<std::uint32_t> read_values(const Reader& rd, std::size_t entry) {
    const std::uint32_t type = rd.u16(entry + 2);
    const std::uint32_t count = rd.u32(entry + 4);
    const std::size_t size = type_size(type);
    if (type != 1 && type != 3 && type != 4)
        throw Error(ErrorCode::CorruptFile, "tiff: unexpected field type " + std::to_string(type));
    if (count > (1u << 20)) throw Error(ErrorCode::CorruptFile, "tiff: field count too large");
    const std::size_t total = size * count;
    const std::size_t at = total <= 4 ? entry + 8 : rd.u32(entry + 8);
    rd.need(at, total);

    std::vector<std::uint32_t> values(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::size_t p = at + i * size;
        values[i] = type == 1 ? rd.data()[p] : type == 3 ? rd.u16(p) : rd.u32(p);
    }
    return values;
}

void put16(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    put16(out, v & 0xffff);
    put16(out, v >> 16);
}

void put_entry(std::vector<std::uint8_t>& out, std::uint16_t tag, std::uint16_t type,
               std::uint32_t count, std::uint32_t value) {
    put16(out, tag);
    put16(out, type);
    put32(out, count);
    if (type == 3 && count == 1) {
        put16(out, value);
        put16(out, 0);
    } else {
        put32(out, value);
    }
}

} // namespace

ImportResult decode_tiff(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) throw Error(ErrorCode::CorruptFile, "tiff: header truncated");
    const Reader rd(bytes, bytes[0] == 'M');
    const std::uint32_t ifd = rd.u32(4);
    const std::uint32_t entries = rd.u16(ifd);
    rd.need(ifd + 2, std::size_t{entries} * 12 + 4);

    std::map<std::uint32_t, std::vector<std::uint32_t>> fields;
    std::vector<std::string> warnings;
    bool metadata = false;
    for (std::uint32_t i = 0; i < entries; ++i) {
        const std::size_t entry = ifd + 2 + std::size_t{i} * 12;
        const std::uint32_t tag = rd.u16(entry);
        switch (tag) {
        case kImageWidth: case kImageLength: case kBitsPerSample: case kCompression:
        case kPhotometric: case kStripOffsets: case kSamplesPerPixel: case kRowsPerStrip:
        case kStripByteCounts: case kPlanarConfig: case kColorMap: case kExtraSamples:
        case kSampleFormat:
            fields[tag] = read_values(rd, entry);
            break;
        case kTileWidth:
            throw Error(ErrorCode::UnsupportedFormat, "tiff: tiled images are not supported");
        case kImageDescription: case kMake: case kSoftware: case kDateTime: case kXmp:
        case kExif: case kIcc:
            metadata = true;
            break;
        default:
            break;
        }
    }
    if (rd.u32(ifd + 2 + std::size_t{entries} * 12) != 0)
        warnings.emplace_back("tiff: additional images after the first were ignored");
    if (metadata) warnings.emplace_back("metadata tags stripped on import");

    auto scalar = [&](std::uint32_t tag, std::optional<std::uint32_t> fallback) -> std::uint32_t {
        auto it = fields.find(tag);
        if (it != fields.end() && !it->second.empty()) return it->second.front();
        if (fallback) return *fallback;
        throw Error(ErrorCode::CorruptFile, "tiff: required tag " + std::to_string(tag) + " missing");
    };

    const std::uint32_t width = scalar(kImageWidth, {});
    const std::uint32_t height = scalar(kImageLength, {});
    check_dimensions(width, height, "tiff");
    if (scalar(kCompression, 1) != 1)
        throw Error(ErrorCode::UnsupportedFormat, "tiff: only uncompressed images are supported");
    if (scalar(kPlanarConfig, 1) != 1)
        throw Error(ErrorCode::UnsupportedFormat, "tiff: planar sample layout is not supported");
    if (scalar(kSampleFormat, 1) != 1)
        throw Error(ErrorCode::UnsupportedFormat, "tiff: only unsigned integer samples are supported");

    const std::uint32_t photometric = scalar(kPhotometric, {});
    const std::uint32_t spp = scalar(kSamplesPerPixel, 1);
    std::vector<std::uint32_t> bits = fields.count(kBitsPerSample) ? fields[kBitsPerSample]
                                                                   : std::vector<std::uint32_t>{1};
    if (bits.size() == 1) bits.resize(spp, bits.front());
    if (bits.size() != spp || !std::all_of(bits.begin(), bits.end(),
                                           [&](std::uint32_t b) { return b == bits.front(); }))
        throw Error(ErrorCode::UnsupportedFormat, "tiff: mixed sample depths");
    const std::uint32_t bps = bits.front();
    if (bps != 8 && bps != 16)
        throw Error(ErrorCode::UnsupportedFormat,
                    "tiff: " + std::to_string(bps) + "-bit samples are not supported");
    if (bps == 16) warnings.emplace_back("16-bit samples reduced to 8 bits (high byte kept)");

    const bool gray = photometric == 0 || photometric == 1;
    const bool rgb = photometric == 2;
    const bool palette = photometric == 3;
    if (!(gray && (spp == 1 || spp == 2)) && !(rgb && (spp == 3 || spp == 4)) &&
        !(palette && spp == 1 && bps == 8)) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "tiff: photometric " + std::to_string(photometric) + " with " +
                        std::to_string(spp) + " samples is not supported");
    }
    std::vector<std::uint32_t> colormap;
    if (palette) {
        colormap = fields[kColorMap];
        if (colormap.size() != 3 * 256) throw Error(ErrorCode::CorruptFile, "tiff: bad color map");
    }

    // Gather strips into one contiguous chunky buffer.
    const std::size_t sample_bytes = bps / 8;
    const std::size_t row_bytes = std::size_t{width} * spp * sample_bytes;
    const std::size_t needed = row_bytes * height;
    const auto& offsets = fields[kStripOffsets];
    const auto& counts = fields[kStripByteCounts];
    if (offsets.empty() || offsets.size() != counts.size())
        throw Error(ErrorCode::CorruptFile, "tiff: strip offsets and byte counts disagree");
    std::vector<std::uint8_t> raw;
    raw.reserve(needed);
    for (std::size_t s = 0; s < offsets.size() && raw.size() < needed; ++s) {
        const std::size_t take = std::min<std::size_t>(counts[s], needed - raw.size());
        rd.need(offsets[s], take);
        raw.insert(raw.end(), bytes.begin() + offsets[s], bytes.begin() + offsets[s] + take);
    }
    if (raw.size() < needed) throw Error(ErrorCode::CorruptFile, "tiff: strip data too short");

    // High byte of a 16-bit sample depends on the byte order.
    const std::size_t hi = (bps == 16 && !rd.big_endian()) ? 1 : 0;
    auto sample = [&](std::size_t pixel, std::size_t channel) -> std::uint8_t {
        return raw[(pixel * spp + channel) * sample_bytes + hi];
    };

    std::vector<std::uint8_t> rgba(std::size_t{width} * height * 4);
    for (std::size_t p = 0; p < std::size_t{width} * height; ++p) {
        std::uint8_t* out = &rgba[p * 4];
        if (gray) {
            std::uint8_t v = sample(p, 0);
            if (photometric == 0) v = static_cast<std::uint8_t>(255 - v);
            out[0] = out[1] = out[2] = v;
            out[3] = spp == 2 ? sample(p, 1) : 255;
        } else if (rgb) {
            out[0] = sample(p, 0);
            out[1] = sample(p, 1);
            out[2] = sample(p, 2);
            out[3] = spp == 4 ? sample(p, 3) : 255;
        } else {
            const std::uint8_t idx = sample(p, 0);
            out[0] = static_cast<std::uint8_t>(colormap[idx] >> 8);
            out[1] = static_cast<std::uint8_t>(colormap[256 + idx] >> 8);
            out[2] = static_cast<std::uint8_t>(colormap[512 + idx] >> 8);
            out[3] = 255;
        }
    }
    return {Raster(width, height, std::move(rgba)), ImageFormat::Tiff, std::move(warnings)};
}

std::vector<std::uint8_t> encode_tiff(const Raster& raster) {
    const std::uint64_t image_size = std::uint64_t{raster.pixel_count()} * 4;
    constexpr std::uint32_t kEntries = 11;
    constexpr std::uint32_t kIfdOffset = 8;
    constexpr std::uint32_t kBitsOffset = kIfdOffset + 2 + kEntries * 12 + 4;
    constexpr std::uint32_t kPixelOffset = kBitsOffset + 8;
    if (image_size + kPixelOffset > 0xffffffffu)
        throw Error(ErrorCode::EncodeError, "tiff: image too large");

    std::vector<std::uint8_t> out;
    out.reserve(kPixelOffset + image_size);
    out.push_back('I');
    out.push_back('I');
    put16(out, 42);
    put32(out, kIfdOffset);

    put16(out, kEntries);
    put_entry(out, kImageWidth, 4, 1, raster.width());
    put_entry(out, kImageLength, 4, 1, raster.height());
    put_entry(out, kBitsPerSample, 3, 4, kBitsOffset);
    put_entry(out, kCompression, 3, 1, 1);
    put_entry(out, kPhotometric, 3, 1, 2);
    put_entry(out, kStripOffsets, 4, 1, kPixelOffset);
    put_entry(out, kSamplesPerPixel, 3, 1, 4);
    put_entry(out, kRowsPerStrip, 4, 1, raster.height());
    put_entry(out, kStripByteCounts, 4, 1, static_cast<std::uint32_t>(image_size));
    put_entry(out, kPlanarConfig, 3, 1, 1);
    put_entry(out, kExtraSamples, 3, 1, 2); // unassociated alpha
    put32(out, 0);

    for (int i = 0; i < 4; ++i) put16(out, 8);
    out.insert(out.end(), raster.bytes().begin(), raster.bytes().end());
    return out;
}

} // namespace swiim::codec

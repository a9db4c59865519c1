#include "swiim/codecs.hpp"
#include "swiim/error.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>

namespace swiim::codec {

namespace {

// Everything libpng touches lives here, outside the frame that calls setjmp,
// so nothing is left indeterminate after a longjmp.
struct PngState {
    std::span<const std::uint8_t> input;
    std::size_t pos = 0;
    std::string error;
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    std::vector<std::uint8_t> output;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    bool sixteen_bit = false;
    bool metadata = false;
};

void on_error(png_structp png, png_const_charp msg) {
    auto* st = static_cast<PngState*>(png_get_error_ptr(png));
    st->error = msg ? msg : "libpng error";
    png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void on_read(png_structp png, png_bytep out, png_size_t n) {
    auto* st = static_cast<PngState*>(png_get_io_ptr(png));
    if (n > st->input.size() - st->pos) png_error(png, "unexpected end of file");
    std::memcpy(out, st->input.data() + st->pos, n);
    st->pos += n;
}

void on_write(png_structp png, png_bytep data, png_size_t n) {
    auto* st = static_cast<PngState*>(png_get_io_ptr(png));
    st->output.insert(st->output.end(), data, data + n);
}

void on_flush(png_structp) {}

bool read_png(png_structp png, png_infop info, PngState& st) {
    if (setjmp(png_jmpbuf(png))) return false;

    png_set_read_fn(png, &st, on_read);
    png_set_user_limits(png, kMaxDimension, kMaxDimension);
    png_read_info(png, info);

    int bit_depth = 0;
    int color_type = 0;
    png_get_IHDR(png, info, &st.width, &st.height, &bit_depth, &color_type, nullptr, nullptr,
                 nullptr);

    if (bit_depth == 16) {
        st.sixteen_bit = true;
        png_set_strip_16(png); // keeps the high byte
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (!(color_type & PNG_COLOR_MASK_ALPHA) && !png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_filler(png, 0xff, PNG_FILLER_AFTER);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != std::size_t{st.width} * 4) {
        png_error(png, "unexpected row layout after expansion");
    }
    st.pixels.resize(std::size_t{st.width} * st.height * 4);
    st.rows.resize(st.height);
    for (png_uint_32 y = 0; y < st.height; ++y)
        st.rows[y] = st.pixels.data() + std::size_t{y} * st.width * 4;
    png_read_image(png, st.rows.data());
    png_read_end(png, info);

    png_textp text = nullptr;
    int num_text = 0;
    if (png_get_text(png, info, &text, &num_text) > 0 ||
        png_get_valid(png, info, PNG_INFO_iCCP | PNG_INFO_tIME | PNG_INFO_pHYs)) {
        st.metadata = true;
    }
    return true;
}

bool write_png(png_structp png, png_infop info, PngState& st, const Raster& r) {
    if (setjmp(png_jmpbuf(png))) return false;

    png_set_write_fn(png, &st, on_write, on_flush);
    png_set_IHDR(png, info, r.width(), r.height(), 8, PNG_COLOR_TYPE_RGB_ALPHA, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    png_write_image(png, st.rows.data());
    png_write_end(png, nullptr);
    return true;
}

} // namespace

ImportResult decode_png(std::span<const std::uint8_t> bytes) {
    PngState st;
    st.input = bytes;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, on_error, on_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::CorruptFile, "png: cannot allocate decoder");
    }
    const bool ok = read_png(png, info, st);
    png_destroy_read_struct(&png, &info, nullptr);
    if (!ok) throw Error(ErrorCode::CorruptFile, "png: " + st.error);
    check_dimensions(st.width, st.height, "png");

    ImportResult result{Raster(st.width, st.height, std::move(st.pixels)), ImageFormat::Png, {}};
    if (st.sixteen_bit)
        result.warnings.emplace_back("16-bit samples reduced to 8 bits (high byte kept)");
    if (st.metadata) result.warnings.emplace_back("metadata chunks stripped on import");
    return result;
}

std::vector<std::uint8_t> encode_png(const Raster& raster) {
    PngState st;
    std::vector<std::uint8_t> copy(raster.bytes().begin(), raster.bytes().end());
    st.rows.resize(raster.height());
    for (std::uint32_t y = 0; y < raster.height(); ++y)
        st.rows[y] = copy.data() + std::size_t{y} * raster.width() * 4;

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &st, on_error, on_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::EncodeError, "png: cannot allocate encoder");
    }
    const bool ok = write_png(png, info, st, raster);
    png_destroy_write_struct(&png, &info);
    if (!ok) throw Error(ErrorCode::EncodeError, "png: " + st.error);
    return std::move(st.output);
}

} // namespace swiim::codec

#include "swiim/codecs.hpp"
#include "swiim/error.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstdlib>

#include <jpeglib.h>

namespace swiim::codec {

namespace {

struct JpegError {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void on_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void on_message(j_common_ptr) {}

struct DecodeState {
    std::vector<std::uint8_t> rgb;
    std::vector<std::uint8_t> row;
    JDIMENSION width = 0;
    JDIMENSION height = 0;
    bool unsupported_colors = false;
    bool metadata = false;
};

bool read_jpeg(jpeg_decompress_struct& cinfo, JpegError& err, std::span<const std::uint8_t> bytes,
               DecodeState& st) {
    if (setjmp(err.jump)) return false;

    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_save_markers(&cinfo, JPEG_APP0 + 1, 0xffff);
    jpeg_save_markers(&cinfo, JPEG_APP0 + 2, 0xffff);
    jpeg_save_markers(&cinfo, JPEG_COM, 0xffff);
    jpeg_read_header(&cinfo, TRUE);

    if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
        st.unsupported_colors = true;
        return true;
    }
    st.metadata = cinfo.marker_list != nullptr;
    st.width = cinfo.image_width;
    st.height = cinfo.image_height;
    if (st.width == 0 || st.height == 0 || st.width > kMaxDimension || st.height > kMaxDimension)
        return true; // rejected by the caller

    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    if (cinfo.output_components != 3) {
        (*cinfo.err->error_exit)(reinterpret_cast<j_common_ptr>(&cinfo));
    }
    st.rgb.resize(std::size_t{st.width} * st.height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = st.rgb.data() + std::size_t{cinfo.output_scanline} * st.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    return true;
}

struct EncodeState {
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    std::vector<std::uint8_t> row;
};

bool write_jpeg(jpeg_compress_struct& cinfo, JpegError& err, const Raster& r, int quality,
                EncodeState& st) {
    if (setjmp(err.jump)) return false;

    jpeg_mem_dest(&cinfo, &st.buffer, &st.size);
    cinfo.image_width = r.width();
    cinfo.image_height = r.height();
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    // No chroma subsampling: 4:4:4.
    for (int c = 0; c < cinfo.num_components; ++c) {
        cinfo.comp_info[c].h_samp_factor = 1;
        cinfo.comp_info[c].v_samp_factor = 1;
    }
    cinfo.dct_method = JDCT_ISLOW;
    jpeg_start_compress(&cinfo, TRUE);

    auto px = r.bytes();
    while (cinfo.next_scanline < cinfo.image_height) {
        const std::size_t base = std::size_t{cinfo.next_scanline} * r.width() * 4;
        for (std::uint32_t x = 0; x < r.width(); ++x) {
            st.row[3 * x] = px[base + 4 * x];
            st.row[3 * x + 1] = px[base + 4 * x + 1];
            st.row[3 * x + 2] = px[base + 4 * x + 2];
        }
        JSAMPROW row = st.row.data();
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    return true;
}

} // namespace

ImportResult decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo{};
    JpegError err{};
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = on_error_exit;
    err.mgr.output_message = on_message;
    jpeg_create_decompress(&cinfo);

    DecodeState st;
    const bool ok = read_jpeg(cinfo, err, bytes, st);
    jpeg_destroy_decompress(&cinfo);
    if (!ok) throw Error(ErrorCode::CorruptFile, std::string("jpg: ") + err.message);
    if (st.unsupported_colors)
        throw Error(ErrorCode::UnsupportedFormat, "jpg: CMYK/YCCK color spaces are not supported");
    check_dimensions(st.width, st.height, "jpg");

    std::vector<std::uint8_t> rgba(std::size_t{st.width} * st.height * 4);
    for (std::size_t i = 0, j = 0; i < st.rgb.size(); i += 3, j += 4) {
        rgba[j] = st.rgb[i];
        rgba[j + 1] = st.rgb[i + 1];
        rgba[j + 2] = st.rgb[i + 2];
        rgba[j + 3] = 255;
    }
    ImportResult result{Raster(st.width, st.height, std::move(rgba)), ImageFormat::Jpeg, {}};
    if (st.metadata) result.warnings.emplace_back("metadata markers stripped on import");
    return result;
}

std::vector<std::uint8_t> encode_jpeg(const Raster& raster, int quality) {
    if (quality < 1 || quality > 100) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "jpg quality must be in 1..100, got " + std::to_string(quality));
    }
    jpeg_compress_struct cinfo{};
    JpegError err{};
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = on_error_exit;
    err.mgr.output_message = on_message;
    jpeg_create_compress(&cinfo);

    EncodeState st;
    st.row.resize(std::size_t{raster.width()} * 3);
    const bool ok = write_jpeg(cinfo, err, raster, quality, st);
    jpeg_destroy_compress(&cinfo);

    std::vector<std::uint8_t> out;
    if (ok && st.buffer) out.assign(st.buffer, st.buffer + st.size);
    std::free(st.buffer);
    if (!ok) throw Error(ErrorCode::EncodeError, std::string("jpg: ") + err.message);
    return out;
}

} // namespace swiim::codec

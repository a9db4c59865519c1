#include "support/gen.hpp"

#include "swiim/codecs.hpp"
#include "swiim/content_hash.hpp"
#include "swiim/error.hpp"

#include <doctest.h>

#include <cstdlib>
#include <cstring>

using namespace swiim;
using swiim::testing::Rng;

namespace {

std::vector<std::uint8_t> fixture(const std::string& name) { return read_file(std::string(SWIIM_TEST_DATA) + "/" + name); }

ErrorCode decode_error(std::span<const std::uint8_t> bytes, std::optional<ImageFormat> declared = {}) {
    try {
        import_image(bytes, declared);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("decode unexpectedly succeeded");
    return ErrorCode::IoError;
}

bool mentions(const std::vector<std::string>& warnings, std::string_view word) {
    for (const auto& w : warnings)
        if (w.find(word) != std::string::npos) return true;
    return false;
}

Raster opaque(Raster r) {
    auto px = r.bytes();
    for (std::size_t i = 3; i < px.size(); i += 4) px[i] = 255;
    return r;
}

constexpr std::array kLossless{ImageFormat::Png, ImageFormat::Bmp, ImageFormat::Tiff};

} // namespace

TEST_CASE("format names") {
    for (auto f : {ImageFormat::Png, ImageFormat::Jpeg, ImageFormat::Bmp, ImageFormat::Tiff})
        CHECK(format_from_name(to_string(f)) == f);
    CHECK(to_string(ImageFormat::Jpeg) == "jpg");
    CHECK_FALSE(format_from_name("jpeg"));
    CHECK(format_from_user_text("JPEG") == ImageFormat::Jpeg);
    CHECK(format_from_user_text("tif") == ImageFormat::Tiff);
    CHECK(format_from_extension("a/b/fig.Tif") == ImageFormat::Tiff);
    CHECK(format_from_extension("x.jpeg") == ImageFormat::Jpeg);
    CHECK_FALSE(format_from_extension("noext"));
    CHECK(mime_type(ImageFormat::Png) == "image/png");
}

TEST_CASE("lossless round trips are bit-exact") {
    Rng rng(21);
    std::vector<Raster> samples{Raster(1, 1, Rgba{0, 0, 0, 0}), Raster(1, 7, Rgba{1, 2, 3, 4}),
                                Raster(5, 1, Rgba{255, 255, 255, 255})};
    for (int i = 0; i < 25; ++i) samples.push_back(testing::random_raster(rng, 40));
    for (const auto& r : samples) {
        for (auto f : kLossless) {
            CAPTURE(to_string(f));
            const auto bytes = export_image(r, f);
            CHECK(detect_format(bytes) == f);
            const auto back = import_image(bytes, f);
            CHECK(back.format == f);
            CHECK(back.raster == r);
            CHECK(back.warnings.empty());
        }
    }
}

TEST_CASE("png and bmp of one raster share a content hash") {
    Rng rng(22);
    for (int i = 0; i < 10; ++i) {
        const Raster r = testing::random_raster(rng, 30);
        const auto png = import_image(export_image(r, ImageFormat::Png)).raster;
        const auto bmp = import_image(export_image(r, ImageFormat::Bmp)).raster;
        CHECK(content_hash(png) == content_hash(bmp));
        CHECK(content_hash(png) == content_hash(r));
    }
}

TEST_CASE("jpeg") {
    Rng rng(23);
    const Raster r = opaque(testing::random_raster(rng, 24));
    const auto back = import_image(export_image(r, ImageFormat::Jpeg, 95)).raster;
    REQUIRE(back.width() == r.width());
    REQUIRE(back.height() == r.height());
    for (std::size_t k = 3; k < back.bytes().size(); k += 4) CHECK(back.bytes()[k] == 255);

    // Flat colour survives almost exactly.
    const Raster flat(16, 16, Rgba{120, 60, 200, 255});
    const auto flat_back = import_image(export_image(flat, ImageFormat::Jpeg, 95)).raster;
    for (std::size_t k = 0; k < flat.bytes().size(); ++k)
        CHECK(std::abs(int(flat.bytes()[k]) - int(flat_back.bytes()[k])) <= 2);

    // Deterministic encoder.
    CHECK(export_image(r, ImageFormat::Jpeg, 80) == export_image(r, ImageFormat::Jpeg, 80));

    for (int q : {0, 101, -5}) {
        try {
            export_image(r, ImageFormat::Jpeg, q);
            FAIL("quality accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParamOutOfRange);
        }
    }
}

TEST_CASE("decoding files written by another encoder") {
    const std::array<std::uint8_t, 6> grays{0, 50, 100, 150, 200, 255};
    for (const char* name : {"gray8.png", "gray8.bmp"}) {
        CAPTURE(name);
        const auto r = import_image(fixture(name)).raster;
        REQUIRE(r.width() == 3);
        REQUIRE(r.height() == 2);
        for (std::uint32_t i = 0; i < 6; ++i) {
            const auto g = grays[i];
            CHECK(r.at(i % 3, i / 3) == Rgba{g, g, g, 255});
        }
    }
    {
        const auto r = import_image(fixture("gray_alpha.png")).raster;
        CHECK(r.at(0, 0) == Rgba{10, 10, 10, 0});
        CHECK(r.at(1, 0) == Rgba{20, 20, 20, 128});
    }
    {
        const auto r = import_image(fixture("palette.png")).raster;
        CHECK(r.at(0, 0) == Rgba{255, 0, 0, 255});
        CHECK(r.at(1, 0) == Rgba{0, 255, 0, 0});
        CHECK(r.at(2, 0) == Rgba{0, 0, 255, 255});
        const auto b = import_image(fixture("palette.bmp")).raster;
        CHECK(b.at(0, 0) == Rgba{255, 0, 0, 255});
        CHECK(b.at(1, 0) == Rgba{0, 255, 0, 255});
        CHECK(b.at(2, 0) == Rgba{0, 0, 255, 255});
    }
    {
        const auto res = import_image(fixture("gray16.png"));
        CHECK(res.raster.at(0, 0) == Rgba{0x12, 0x12, 0x12, 255});
        CHECK(res.raster.at(1, 0) == Rgba{0xab, 0xab, 0xab, 255});
        CHECK(mentions(res.warnings, "16"));
    }
    {
        const std::array<Rgba, 4> expected{Rgba{255, 0, 0, 255}, Rgba{0, 255, 0, 255}, Rgba{0, 0, 255, 255},
                                           Rgba{10, 20, 30, 255}};
        for (const char* name : {"rgb24.bmp", "rgb_pil.tiff", "rgb.png"}) {
            CAPTURE(name);
            const auto r = import_image(fixture(name)).raster;
            for (std::uint32_t i = 0; i < 4; ++i) CHECK(r.at(i % 2, i / 2) == expected[i]);
        }
    }
    {
        const auto r = import_image(fixture("rgb_be.tiff")).raster;
        CHECK(r.at(0, 0) == Rgba{1, 2, 3, 255});
        CHECK(r.at(1, 0) == Rgba{250, 251, 252, 255});
    }
    {
        const auto r = import_image(fixture("gray.jpg")).raster;
        for (std::uint32_t y = 0; y < 8; ++y)
            for (std::uint32_t x = 0; x < 8; ++x) {
                const Rgba c = r.at(x, y);
                CHECK(c.r == c.g);
                CHECK(c.g == c.b);
                CHECK(std::abs(int(c.r) - 128) <= 1);
            }
    }
}

TEST_CASE("unsupported and mismatched inputs") {
    CHECK(decode_error(fixture("rgb.gif")) == ErrorCode::UnsupportedFormat);
    CHECK(decode_error(fixture("cmyk.jpg")) == ErrorCode::UnsupportedFormat);
    CHECK(decode_error(fixture("rgb_lzw.tiff")) == ErrorCode::UnsupportedFormat);
    CHECK(decode_error(fixture("rgb.png"), ImageFormat::Jpeg) == ErrorCode::FormatMismatch);
    const std::vector<std::uint8_t> junk{'h', 'e', 'l', 'l', 'o'};
    CHECK(decode_error(junk) == ErrorCode::UnsupportedFormat);
    CHECK(decode_error(std::vector<std::uint8_t>{}) == ErrorCode::UnsupportedFormat);
}

TEST_CASE("oversized dimensions are rejected before allocating") {
    // 24-bit BMP header claiming 100000 x 1.
    auto bmp = export_image(Raster(1, 1), ImageFormat::Bmp);
    const std::uint32_t width = 100000;
    std::memcpy(&bmp[18], &width, 4);
    CHECK(decode_error(bmp) == ErrorCode::CorruptFile);
}

TEST_CASE("damaged files fail cleanly") {
    Rng rng(24);
    const Raster r = opaque(testing::random_raster(rng, 12, 9));
    for (auto f : {ImageFormat::Png, ImageFormat::Jpeg, ImageFormat::Bmp, ImageFormat::Tiff}) {
        CAPTURE(to_string(f));
        const auto good = export_image(r, f, 90);
        int errors = 0;
        for (std::size_t n = 0; n < good.size(); n += std::max<std::size_t>(1, good.size() / 97)) {
            try {
                import_image(std::span(good).first(n));
            } catch (const Error&) {
                ++errors;
            }
        }
        CHECK(errors > 0);
        for (int i = 0; i < 300; ++i) {
            auto bad = good;
            const auto flips = testing::uniform(rng, 1, 4);
            for (int k = 0; k < flips; ++k) {
                const auto at = static_cast<std::size_t>(testing::uniform(rng, 0, bad.size() - 1));
                bad[at] = static_cast<std::uint8_t>(testing::uniform(rng, 0, 255));
            }
            try {
                const auto res = import_image(bad);
                CHECK(res.raster.width() >= 1);
            } catch (const Error&) {
                // Structured rejection is the expected outcome.
            }
        }
    }
}

TEST_CASE("file helpers report I/O failures") {
    try {
        read_file("/nonexistent/dir/file.png");
        FAIL("read succeeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
    try {
        write_file("/nonexistent/dir/file.png", std::vector<std::uint8_t>{1});
        FAIL("write succeeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

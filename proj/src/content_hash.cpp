#include "swiim/content_hash.hpp"

#include "swiim/error.hpp"

#include <openssl/evp.h>

#include <memory>

namespace swiim {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

void put_be32(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v >> 24);
    out[1] = static_cast<std::uint8_t>(v >> 16);
    out[2] = static_cast<std::uint8_t>(v >> 8);
    out[3] = static_cast<std::uint8_t>(v);
}

} // namespace

ContentHash ContentHash::of(const Raster& raster) {
    std::uint8_t dims[8];
    put_be32(dims, raster.width());
    put_be32(dims + 4, raster.height());

    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    Digest digest{};
    unsigned int len = 0;
    auto px = raster.bytes();
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), dims, sizeof dims) != 1 ||
        EVP_DigestUpdate(ctx.get(), px.data(), px.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1 || len != digest.size()) {
        throw Error(ErrorCode::InvariantViolation, "sha-256 digest computation failed");
    }
    return ContentHash(digest);
}

std::optional<ContentHash> ContentHash::from_hex(std::string_view hex) {
    if (hex.size() != 64) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    Digest d{};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        d[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return ContentHash(d);
}

std::string ContentHash::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(64, '0');
    for (std::size_t i = 0; i < digest_.size(); ++i) {
        out[2 * i] = kDigits[digest_[i] >> 4];
        out[2 * i + 1] = kDigits[digest_[i] & 0x0f];
    }
    return out;
}

} // namespace swiim

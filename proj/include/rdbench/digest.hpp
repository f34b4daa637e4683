#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "rdbench/errors.hpp"

namespace rdbench {

// 128-bit MD5 digest as lowercase hex. Used for bitstream identity checks and
// cache keys, not for security.
class Md5 {
public:
    Md5() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_md5(), nullptr) != 1)
            throw error("MD5 init failed");
    }

    void update(std::span<const std::uint8_t> data) {
        if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1)
            throw error("MD5 update failed");
    }

    void update(std::string_view s) {
        if (EVP_DigestUpdate(ctx_.get(), s.data(), s.size()) != 1)
            throw error("MD5 update failed");
    }

    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw error("MD5 final failed");
        static const char* digits = "0123456789abcdef";
        std::string out;
        out.reserve(2 * len);
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 0xf]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string md5_hex(std::string_view data) {
    Md5 h;
    h.update(data);
    return h.hex();
}

inline std::string md5_file_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input_error("md5: cannot open " + path.string());
    Md5 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        std::streamsize got = in.gcount();
        if (got > 0)
            h.update(std::span<const std::uint8_t>(
                reinterpret_cast<const std::uint8_t*>(buf), static_cast<std::size_t>(got)));
    }
    return h.hex();
}

}  // namespace rdbench

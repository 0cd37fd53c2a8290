#include "formsight/util.hpp"

#include "formsight/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace formsight::util {

namespace {

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<int, 256> build_b64_reverse() {
    std::array<int, 256> table{};
    table.fill(-1);
    for (int i = 0; i < 64; ++i) {
        table[static_cast<unsigned char>(kB64Alphabet[i])] = i;
    }
    return table;
}

}  // namespace

std::string base64_encode(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::string out;
    out.reserve(((size + 2) / 3) * 4);
    std::size_t i = 0;
    for (; i + 3 <= size; i += 3) {
        std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(kB64Alphabet[(n >> 18) & 63]);
        out.push_back(kB64Alphabet[(n >> 12) & 63]);
        out.push_back(kB64Alphabet[(n >> 6) & 63]);
        out.push_back(kB64Alphabet[n & 63]);
    }
    if (i + 1 == size) {
        std::uint32_t n = bytes[i] << 16;
        out.push_back(kB64Alphabet[(n >> 18) & 63]);
        out.push_back(kB64Alphabet[(n >> 12) & 63]);
        out.append("==");
    } else if (i + 2 == size) {
        std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(kB64Alphabet[(n >> 18) & 63]);
        out.push_back(kB64Alphabet[(n >> 12) & 63]);
        out.push_back(kB64Alphabet[(n >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::string base64_encode(std::string_view bytes) {
    return base64_encode(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    static const std::array<int, 256> reverse = build_b64_reverse();
    if (text.size() % 4 != 0) {
        throw std::invalid_argument("base64 input length is not a multiple of 4");
    }
    std::vector<std::uint8_t> out;
    out.reserve((text.size() / 4) * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int j = 0; j < 4; ++j) {
            char c = text[i + j];
            if (c == '=') {
                if (i + 4 != text.size() || j < 2) {
                    throw std::invalid_argument("unexpected base64 padding");
                }
                vals[j] = 0;
                ++pad;
            } else {
                int v = reverse[static_cast<unsigned char>(c)];
                if (v < 0 || pad > 0) {
                    throw std::invalid_argument("invalid base64 character");
                }
                vals[j] = v;
            }
        }
        std::uint32_t n = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out.push_back(static_cast<std::uint8_t>((n >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(n & 0xff));
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file for reading: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open file for writing: " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("rename failed for " + path.string() + ": " + ec.message());
    }
}

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string iso8601_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace formsight::util

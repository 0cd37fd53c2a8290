#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace formsight::util {

std::string base64_encode(const void* data, std::size_t size);
std::string base64_encode(std::string_view bytes);
// Strict decoder; throws std::invalid_argument on anything outside the alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view s);
std::string ascii_lower(std::string_view s);

std::string iso8601_utc_now();

}  // namespace formsight::util

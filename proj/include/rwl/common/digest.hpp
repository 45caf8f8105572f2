#pragma once

#include <span>
#include <string>
#include <string_view>

namespace rwl {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::span<const unsigned char> bytes);

}  // namespace rwl

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imgchain {

// Lowercase, two characters per byte.
std::string byte_to_hex(std::span<const std::uint8_t> bytes);

// Accepts lowercase hex of even length; throws DataError otherwise.
std::vector<std::uint8_t> hex_to_byte(std::string_view hex);

}  // namespace imgchain

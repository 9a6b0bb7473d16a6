#include "imgchain/hex.hpp"

#include "imgchain/error.hpp"

namespace imgchain {

std::string byte_to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> hex_to_byte(std::string_view hex)
{
    if (hex.size() % 2 != 0) throw DataError("hex string has odd length " + std::to_string(hex.size()));
    auto nibble = [&](std::size_t i) {
        const char c = hex[i];
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw DataError("invalid hex character at position " + std::to_string(i));
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(2 * i) << 4 | nibble(2 * i + 1));
    return out;
}

}  // namespace imgchain

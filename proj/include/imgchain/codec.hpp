#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "imgchain/image.hpp"

namespace imgchain {

enum class ImageFormat { Png, Pnm };

// Decodes PNG or binary NetPBM (P5/P6) into an 8-bit gray or RGB image.
// Alpha is dropped and 16-bit samples are reduced to 8 bits.
// Throws DataError naming the offset or reason on corrupt input.
Image decode_image(std::span<const std::uint8_t> bytes);

// PNG keeps the channel count; Pnm writes P5 for gray and P6 for RGB.
std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Image load_image(const std::filesystem::path& path);
// Format follows the extension: .pgm/.ppm/.pnm write NetPBM, anything else PNG.
void save_image(const std::filesystem::path& path, const Image& img);

}  // namespace imgchain

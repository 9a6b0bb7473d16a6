#include "imgchain/image.hpp"

#include "imgchain/error.hpp"

namespace imgchain {

namespace {

void check_shape(int width, int height, int channels)
{
    if (width < 1 || height < 1)
        throw DataError("image dimensions must be positive");
    if (channels != 1 && channels != 3)
        throw DataError("image must have 1 or 3 channels, got " + std::to_string(channels));
}

}  // namespace

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels)
{
    check_shape(width, height, channels);
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data))
{
    check_shape(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw DataError("pixel buffer length does not match " + std::to_string(width) + "x" +
                        std::to_string(height) + "x" + std::to_string(channels));
}

}  // namespace imgchain

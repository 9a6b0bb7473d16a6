#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace imgchain {

// Owned row-major 8-bit pixel grid, 1 (gray) or 3 (RGB) interleaved channels.
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, std::uint8_t fill = 0);
    Image(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    std::uint8_t& at(int x, int y, int c = 0)
    {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const
    {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<std::uint8_t> pixels() { return data_; }
    std::span<const std::uint8_t> pixels() const { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

enum class AttackKind { Blur, Rotate, Crop, FlipH, FlipV, FlipBoth };

enum class FlipAxis { H, V, Both };

struct AttackSpec {
    AttackKind kind = AttackKind::Blur;
    double parameter = 0.0;  // blur %, degrees or crop %; unused for flips
    int step = 1;            // 1-based ordinal within a suite

    friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

// Round half up and clamp to the 8-bit range.
inline std::uint8_t round_pixel(double v)
{
    if (!(v > 0.0)) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(static_cast<int>(v + 0.5));
}

}  // namespace imgchain

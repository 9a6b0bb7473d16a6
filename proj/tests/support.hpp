#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "imgchain/image.hpp"

namespace testing {

// Fresh directory under the build tree's temp area, removed on exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
        : path_(std::filesystem::temp_directory_path() / ("imgchain_test_" + tag))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline imgchain::Image noise_image(int w, int h, int channels, unsigned seed)
{
    std::mt19937 rng(seed);
    imgchain::Image img(w, h, channels);
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng() & 0xff);
    return img;
}

inline imgchain::Image constant_image(int w, int h, int channels, std::uint8_t v)
{
    return imgchain::Image(w, h, channels, v);
}

}  // namespace testing

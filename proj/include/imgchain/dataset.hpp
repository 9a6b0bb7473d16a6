#pragma once

#include <array>
#include <filesystem>
#include <string_view>
#include <vector>

#include "imgchain/image.hpp"

namespace imgchain {

// Stems of the built-in synthetic dataset; the first five are the default test set.
inline constexpr std::array<std::string_view, 12> kDatasetNames = {
    "house",     "lake",  "mandrill",  "peppers",  "woman_blonde", "cameraman",
    "jetplane",  "plane", "livingroom", "pirate", "walkbridge",   "woman_darkhair"};

// Deterministic RGB test picture seeded by `name`: a bright and a dark
// region split by a soft edge at a random angle, 1/f-style texture,
// scattered shapes plus a central subject, and mild noise.
Image synthetic_image(std::string_view name, int side = 256);

// Writes <name>.png for every dataset stem into `dir`.
std::vector<std::filesystem::path> write_synthetic_dataset(const std::filesystem::path& dir, int side = 256);

}  // namespace imgchain

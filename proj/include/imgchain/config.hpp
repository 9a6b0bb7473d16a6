#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "imgchain/network.hpp"
#include "imgchain/transform.hpp"

namespace imgchain {

struct ClassifierThresholds {
    double flip_min = 0.05;          // best flip score must fall below this
    double flip_spread_factor = 4.0; // worst flip score must exceed factor * best
    double blur_max = 0.15;
    double blur_range = 0.08;
    double crop_tolerance = 0.02;    // allowed dip between consecutive scores
    double crop_range = 0.08;
    double crop_start = 0.05;        // a light crop barely moves the score
    double rotation_error_rate = 0.5;
};

struct Config {
    int difficulty = 4;
    CropAnchor crop_anchor = CropAnchor::Center;
    bool rotate_expand = false;
    ReplicaMode replicas = ReplicaMode::Shared;
    ClassifierThresholds classifier;
    std::vector<std::string> testset = {"house", "lake", "mandrill", "peppers", "woman_blonde"};
};

// key=value lines; '#' starts a comment. Unknown keys are errors.
// Keys: difficulty, crop.anchor (center|topleft), rotate.expand (true|false),
// replicas (shared|deep), classifier.<field>, testset (comma list).
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

}  // namespace imgchain

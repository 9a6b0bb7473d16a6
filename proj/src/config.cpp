#include "imgchain/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "imgchain/error.hpp"

namespace imgchain {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value)
{
    double v = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || end != value.data() + value.size())
        throw DataError("config: " + std::string(key) + " expects a number, got '" + std::string(value) + "'");
    return v;
}

int to_int(std::string_view key, std::string_view value)
{
    int v = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || end != value.data() + value.size() || v < 0)
        throw DataError("config: " + std::string(key) + " expects a non-negative integer");
    return v;
}

}  // namespace

Config parse_config(std::string_view text)
{
    Config cfg;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw DataError("config line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        auto& th = cfg.classifier;

        if (key == "difficulty") {
            cfg.difficulty = to_int(key, value);
        } else if (key == "crop.anchor") {
            if (value == "center") cfg.crop_anchor = CropAnchor::Center;
            else if (value == "topleft") cfg.crop_anchor = CropAnchor::TopLeft;
            else throw DataError("config: crop.anchor must be center or topleft");
        } else if (key == "rotate.expand") {
            if (value != "true" && value != "false") throw DataError("config: rotate.expand must be true or false");
            cfg.rotate_expand = value == "true";
        } else if (key == "replicas") {
            if (value == "shared") cfg.replicas = ReplicaMode::Shared;
            else if (value == "deep") cfg.replicas = ReplicaMode::Deep;
            else throw DataError("config: replicas must be shared or deep");
        } else if (key == "classifier.flip_min") {
            th.flip_min = to_double(key, value);
        } else if (key == "classifier.flip_spread_factor") {
            th.flip_spread_factor = to_double(key, value);
        } else if (key == "classifier.blur_max") {
            th.blur_max = to_double(key, value);
        } else if (key == "classifier.blur_range") {
            th.blur_range = to_double(key, value);
        } else if (key == "classifier.crop_tolerance") {
            th.crop_tolerance = to_double(key, value);
        } else if (key == "classifier.crop_range") {
            th.crop_range = to_double(key, value);
        } else if (key == "classifier.crop_start") {
            th.crop_start = to_double(key, value);
        } else if (key == "classifier.rotation_error_rate") {
            th.rotation_error_rate = to_double(key, value);
        } else if (key == "testset") {
            cfg.testset.clear();
            std::string_view rest = value;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                const auto item = trim(rest.substr(0, comma));
                if (!item.empty()) cfg.testset.emplace_back(item);
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        } else {
            throw DataError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace imgchain

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "imgchain/image.hpp"

namespace imgchain {

// Canonical precedence order is the declaration order.
enum class AlgorithmId { Average, PHash, BlockMean, MarrHildreth, RadialVariance };

inline constexpr std::array<AlgorithmId, 5> kAllAlgorithms = {
    AlgorithmId::Average, AlgorithmId::PHash, AlgorithmId::BlockMean, AlgorithmId::MarrHildreth,
    AlgorithmId::RadialVariance};

inline constexpr int precedence(AlgorithmId algo) { return static_cast<int>(algo); }

// "AverageHash", "PHash", "BlockMeanHash", "MarrHildrethHash", "RadialVarianceHash".
std::string_view algorithm_name(AlgorithmId algo);
std::optional<AlgorithmId> algorithm_from_name(std::string_view name);

// Fixed hashing constants. Changing any of them changes every golden vector.
struct HashParameters {
    static constexpr int average_side = 8;
    static constexpr int phash_side = 32;
    static constexpr int phash_keep = 8;
    static constexpr int block_mean_side = 256;
    static constexpr int block_mean_grid = 16;
    static constexpr int marr_side = 512;
    static constexpr int marr_grid = 24;
    static constexpr int log_size = 15;
    static constexpr double log_sigma = 2.8284271247461903;  // 2 * sqrt(2)
    static constexpr int log_tap_scale = 256;
    static constexpr int radial_angles = 180;
    static constexpr int radial_features = 40;
};

// Bit length of a binary hash: 64, 64, 256, 576. Zero for RadialVariance.
int bit_length(AlgorithmId algo);

// Fixed-length bit vector packed big-endian (bit 0 is the MSB of byte 0).
class BitHash {
public:
    BitHash(AlgorithmId algo, std::vector<std::uint8_t> packed);
    static BitHash from_bits(AlgorithmId algo, const std::vector<bool>& bits);

    AlgorithmId algo() const { return algo_; }
    int size() const { return bit_length(algo_); }
    bool bit(int i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    friend bool operator==(const BitHash&, const BitHash&) = default;

private:
    AlgorithmId algo_;
    std::vector<std::uint8_t> bytes_;
};

struct RadialDigest {
    std::array<std::uint8_t, HashParameters::radial_features> features{};
    friend bool operator==(const RadialDigest&, const RadialDigest&) = default;
};

using PerceptualHash = std::variant<BitHash, RadialDigest>;

BitHash average_hash(const Image& img);
BitHash p_hash(const Image& img);
BitHash block_mean_hash(const Image& img);
BitHash marr_hildreth_hash(const Image& img);
RadialDigest radial_variance_hash(const Image& img);
PerceptualHash compute_hash(AlgorithmId algo, const Image& img);

AlgorithmId algorithm_of(const PerceptualHash& h);

// Throws DataError when the hashes come from different algorithms.
int hamming_distance(const BitHash& a, const BitHash& b);
// 1 - peak Pearson correlation over all circular shifts, clamped to [0, 1].
double radial_distance(const RadialDigest& a, const RadialDigest& b);
// value / max; throws DataError for max <= 0.
double normalize(double value, double max);
double compare(AlgorithmId algo, const PerceptualHash& a, const PerceptualHash& b);

// "<AlgorithmName>:<lowercase hex>" and its inverse.
std::string serialize(const PerceptualHash& h);
PerceptualHash parse_hash(std::string_view text);

// Integer Laplacian-of-Gaussian factors: the 2-D kernel is
// second(x)*gauss(y) + gauss(x)*second(y), and `second` sums to zero.
struct LogTaps {
    std::vector<std::int64_t> gauss;
    std::vector<std::int64_t> second;
};
const LogTaps& log_taps();

}  // namespace imgchain

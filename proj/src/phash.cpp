#include "imgchain/phash.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "imgchain/error.hpp"
#include "imgchain/hex.hpp"
#include "imgchain/kernels.hpp"
#include "imgchain/transform.hpp"

namespace imgchain {

namespace {

using P = HashParameters;

constexpr std::array<std::string_view, 5> kNames = {"AverageHash", "PHash", "BlockMeanHash", "MarrHildrethHash",
                                                     "RadialVarianceHash"};

Image gray_resized(const Image& img, int side) { return resize(to_grayscale(img), side, side); }

LogTaps build_log_taps()
{
    const int r = P::log_size / 2;
    const double s2 = P::log_sigma * P::log_sigma;
    LogTaps taps;
    for (int x = -r; x <= r; ++x) {
        const double g = std::exp(-(x * x) / (2.0 * s2));
        taps.gauss.push_back(std::llround(P::log_tap_scale * g));
        taps.second.push_back(std::llround(P::log_tap_scale * (x * x / s2 - 1.0) * g));
    }
    // Zero-sum second-derivative taps, so constant regions give exactly zero.
    const std::int64_t excess = std::accumulate(taps.second.begin(), taps.second.end(), std::int64_t{0});
    taps.second[r] -= excess;
    return taps;
}

// Pearson correlation of a with b circularly shifted by `shift`, in exact
// integer arithmetic up to the final division.
double shifted_pearson(const RadialDigest& a, const RadialDigest& b, int shift)
{
    constexpr int n = P::radial_features;
    std::int64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < n; ++i) {
        const std::int64_t x = a.features[i];
        const std::int64_t y = b.features[(i + shift) % n];
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    const std::int64_t cov = n * sab - sa * sb;
    const std::int64_t va = n * saa - sa * sa;
    const std::int64_t vb = n * sbb - sb * sb;
    if (cov > 0 && static_cast<__int128>(cov) * cov == static_cast<__int128>(va) * vb) return 1.0;
    const double r = static_cast<double>(cov) / (std::sqrt(static_cast<double>(va)) * std::sqrt(static_cast<double>(vb)));
    return std::clamp(r, -1.0, 1.0);
}

bool zero_variance(const RadialDigest& d)
{
    return std::all_of(d.features.begin(), d.features.end(), [&](std::uint8_t v) { return v == d.features[0]; });
}

}  // namespace

std::string_view algorithm_name(AlgorithmId algo) { return kNames[precedence(algo)]; }

std::optional<AlgorithmId> algorithm_from_name(std::string_view name)
{
    for (AlgorithmId a : kAllAlgorithms)
        if (algorithm_name(a) == name) return a;
    return std::nullopt;
}

int bit_length(AlgorithmId algo)
{
    switch (algo) {
    case AlgorithmId::Average: return P::average_side * P::average_side;
    case AlgorithmId::PHash: return P::phash_keep * P::phash_keep;
    case AlgorithmId::BlockMean: return P::block_mean_grid * P::block_mean_grid;
    case AlgorithmId::MarrHildreth: return P::marr_grid * P::marr_grid;
    case AlgorithmId::RadialVariance: return 0;
    }
    return 0;
}

BitHash::BitHash(AlgorithmId algo, std::vector<std::uint8_t> packed) : algo_(algo), bytes_(std::move(packed))
{
    const int bits = bit_length(algo);
    if (bits == 0) throw DataError("RadialVarianceHash is not a bit hash");
    if (static_cast<int>(bytes_.size()) * 8 != bits)
        throw DataError(std::string(algorithm_name(algo)) + " expects " + std::to_string(bits / 8) + " bytes, got " +
                        std::to_string(bytes_.size()));
}

BitHash BitHash::from_bits(AlgorithmId algo, const std::vector<bool>& bits)
{
    std::vector<std::uint8_t> packed((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
    return BitHash(algo, std::move(packed));
}

BitHash average_hash(const Image& img)
{
    const Image small = gray_resized(img, P::average_side);
    const auto px = small.pixels();
    const int sum = std::accumulate(px.begin(), px.end(), 0);
    const int n = static_cast<int>(px.size());
    std::vector<bool> bits(n);
    for (int i = 0; i < n; ++i) bits[i] = px[i] * n > sum;
    return BitHash::from_bits(AlgorithmId::Average, bits);
}

BitHash p_hash(const Image& img)
{
    constexpr int side = P::phash_side;
    constexpr int keep = P::phash_keep;
    Matrix block = to_plane(gray_resized(img, side));
    const double mean = std::accumulate(block.data.begin(), block.data.end(), 0.0) / block.data.size();
    // AC terms come from the mean-centred block so flat inputs give exact zeros.
    for (double& v : block.data) v -= mean;
    Matrix coeffs = dct2(block);
    coeffs(0, 0) = side * mean;

    double ac_sum = 0.0;
    for (int y = 0; y < keep; ++y)
        for (int x = 0; x < keep; ++x)
            if (x || y) ac_sum += coeffs(x, y);
    const double ac_mean = ac_sum / (keep * keep - 1);

    std::vector<bool> bits(keep * keep);
    for (int y = 0; y < keep; ++y)
        for (int x = 0; x < keep; ++x) bits[y * keep + x] = coeffs(x, y) > ac_mean;
    return BitHash::from_bits(AlgorithmId::PHash, bits);
}

BitHash block_mean_hash(const Image& img)
{
    constexpr int grid = P::block_mean_grid;
    constexpr int cell = P::block_mean_side / grid;
    const Image small = gray_resized(img, P::block_mean_side);
    std::vector<int> sums(grid * grid, 0);
    for (int y = 0; y < P::block_mean_side; ++y)
        for (int x = 0; x < P::block_mean_side; ++x) sums[(y / cell) * grid + x / cell] += small.at(x, y);

    std::vector<int> sorted = sums;
    std::sort(sorted.begin(), sorted.end());
    const int mid = grid * grid / 2;
    const int twice_median = sorted[mid - 1] + sorted[mid];

    std::vector<bool> bits(grid * grid);
    for (int i = 0; i < grid * grid; ++i) bits[i] = 2 * sums[i] > twice_median;
    return BitHash::from_bits(AlgorithmId::BlockMean, bits);
}

const LogTaps& log_taps()
{
    static const LogTaps taps = build_log_taps();
    return taps;
}

BitHash marr_hildreth_hash(const Image& img)
{
    constexpr int side = P::marr_side;
    constexpr int grid = P::marr_grid;
    const Image small = gray_resized(img, side);
    kernels::Plane<std::int64_t> plane(side, side);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) plane(x, y) = small.at(x, y);

    const LogTaps& taps = log_taps();
    const std::span<const std::int64_t> g = taps.gauss;
    const std::span<const std::int64_t> d2 = taps.second;
    const auto dxx = kernels::convolve_separable<std::int64_t>(plane, d2, g);
    const auto dyy = kernels::convolve_separable<std::int64_t>(plane, g, d2);

    std::vector<std::int64_t> sums(grid * grid, 0);
    std::vector<int> cell_of(side);
    for (int i = 0; i < side; ++i) cell_of[i] = i * grid / side;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) sums[cell_of[y] * grid + cell_of[x]] += dxx(x, y) + dyy(x, y);

    __int128 total = 0;
    for (std::int64_t s : sums) total += s;
    std::vector<bool> bits(grid * grid);
    for (int i = 0; i < grid * grid; ++i) bits[i] = static_cast<__int128>(sums[i]) * (grid * grid) > total;
    return BitHash::from_bits(AlgorithmId::MarrHildreth, bits);
}

RadialDigest radial_variance_hash(const Image& img)
{
    const Matrix plane = to_plane(to_grayscale(img));
    std::vector<double> features = kernels::radial_line_variance(plane, P::radial_angles);

    // Standardise so the DC coefficient does not swamp the digest.
    const double n = static_cast<double>(features.size());
    const double mean = std::accumulate(features.begin(), features.end(), 0.0) / n;
    double var = 0.0;
    for (double f : features) var += (f - mean) * (f - mean);
    const double sd = std::sqrt(var / n);
    for (double& f : features) f = sd > 0.0 ? (f - mean) / sd : 0.0;

    std::vector<double> coeffs = dct1(features);
    coeffs.resize(P::radial_features);
    const auto [lo, hi] = std::minmax_element(coeffs.begin(), coeffs.end());
    const double min = *lo;
    const double range = *hi - *lo;

    RadialDigest digest;
    if (range > 0.0)
        for (int i = 0; i < P::radial_features; ++i)
            digest.features[i] = round_pixel((coeffs[i] - min) / range * 255.0);
    return digest;
}

PerceptualHash compute_hash(AlgorithmId algo, const Image& img)
{
    switch (algo) {
    case AlgorithmId::Average: return average_hash(img);
    case AlgorithmId::PHash: return p_hash(img);
    case AlgorithmId::BlockMean: return block_mean_hash(img);
    case AlgorithmId::MarrHildreth: return marr_hildreth_hash(img);
    case AlgorithmId::RadialVariance: return radial_variance_hash(img);
    }
    throw DataError("unknown algorithm");
}

AlgorithmId algorithm_of(const PerceptualHash& h)
{
    if (const auto* b = std::get_if<BitHash>(&h)) return b->algo();
    return AlgorithmId::RadialVariance;
}

int hamming_distance(const BitHash& a, const BitHash& b)
{
    if (a.algo() != b.algo())
        throw DataError("cannot compare " + std::string(algorithm_name(a.algo())) + " with " +
                        std::string(algorithm_name(b.algo())));
    int distance = 0;
    for (std::size_t i = 0; i < a.bytes().size(); ++i)
        distance += std::popcount(static_cast<unsigned>(a.bytes()[i] ^ b.bytes()[i]));
    return distance;
}

double radial_distance(const RadialDigest& a, const RadialDigest& b)
{
    if (zero_variance(a) || zero_variance(b)) return a == b ? 0.0 : 1.0;
    double peak = -1.0;
    for (int s = 0; s < P::radial_features; ++s) peak = std::max(peak, shifted_pearson(a, b, s));
    return std::clamp(1.0 - peak, 0.0, 1.0);
}

double normalize(double value, double max)
{
    if (!(max > 0.0)) throw DataError("normalization maximum must be positive");
    return value / max;
}

double compare(AlgorithmId algo, const PerceptualHash& a, const PerceptualHash& b)
{
    if (algorithm_of(a) != algo || algorithm_of(b) != algo)
        throw DataError("hash algorithm does not match " + std::string(algorithm_name(algo)));
    if (algo == AlgorithmId::RadialVariance)
        return radial_distance(std::get<RadialDigest>(a), std::get<RadialDigest>(b));
    return normalize(hamming_distance(std::get<BitHash>(a), std::get<BitHash>(b)), bit_length(algo));
}

std::string serialize(const PerceptualHash& h)
{
    std::string out(algorithm_name(algorithm_of(h)));
    out += ':';
    if (const auto* b = std::get_if<BitHash>(&h))
        out += byte_to_hex(b->bytes());
    else
        out += byte_to_hex(std::get<RadialDigest>(h).features);
    return out;
}

PerceptualHash parse_hash(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw DataError("perceptual hash lacks an algorithm prefix");
    const auto algo = algorithm_from_name(text.substr(0, colon));
    if (!algo) throw DataError("unknown hash algorithm '" + std::string(text.substr(0, colon)) + "'");
    auto bytes = hex_to_byte(text.substr(colon + 1));
    if (*algo != AlgorithmId::RadialVariance) return BitHash(*algo, std::move(bytes));
    if (bytes.size() != P::radial_features)
        throw DataError("RadialVarianceHash expects " + std::to_string(P::radial_features) + " bytes");
    RadialDigest d;
    std::copy(bytes.begin(), bytes.end(), d.features.begin());
    return d;
}

}  // namespace imgchain

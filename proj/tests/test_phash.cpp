#include <cmath>
#include <string>

#include "doctest.h"
#include "imgchain/dataset.hpp"
#include "imgchain/error.hpp"
#include "imgchain/phash.hpp"
#include "imgchain/transform.hpp"
#include "support.hpp"

using namespace imgchain;

namespace {

int popcount(const BitHash& h)
{
    int n = 0;
    for (int i = 0; i < h.size(); ++i) n += h.bit(i);
    return n;
}

BitHash complement(const BitHash& h)
{
    std::vector<std::uint8_t> bytes = h.bytes();
    for (auto& b : bytes) b = static_cast<std::uint8_t>(~b);
    return BitHash(h.algo(), bytes);
}

}  // namespace

TEST_SUITE("phash") {

TEST_CASE("names and lengths")
{
    CHECK(algorithm_name(AlgorithmId::Average) == "AverageHash");
    CHECK(algorithm_name(AlgorithmId::PHash) == "PHash");
    CHECK(algorithm_name(AlgorithmId::BlockMean) == "BlockMeanHash");
    CHECK(algorithm_name(AlgorithmId::MarrHildreth) == "MarrHildrethHash");
    CHECK(algorithm_name(AlgorithmId::RadialVariance) == "RadialVarianceHash");
    for (AlgorithmId a : kAllAlgorithms) CHECK(algorithm_from_name(algorithm_name(a)) == a);
    CHECK_FALSE(algorithm_from_name("Sha1").has_value());
    CHECK(bit_length(AlgorithmId::Average) == 64);
    CHECK(bit_length(AlgorithmId::PHash) == 64);
    CHECK(bit_length(AlgorithmId::BlockMean) == 256);
    CHECK(bit_length(AlgorithmId::MarrHildreth) == 576);
}

TEST_CASE("average hash")
{
    CHECK(popcount(average_hash(testing::constant_image(32, 32, 3, 140))) == 0);

    Image halves(8, 8, 1, 0);
    for (int y = 0; y < 8; ++y)
        for (int x = 4; x < 8; ++x) halves.at(x, y) = 255;
    const BitHash h = average_hash(halves);
    for (auto b : h.bytes()) CHECK(b == 0x0F);

    const Image img = testing::noise_image(50, 40, 3, 1);
    CHECK(hamming_distance(average_hash(img), average_hash(img)) == 0);
}

TEST_CASE("phash")
{
    const BitHash c = p_hash(testing::constant_image(64, 64, 1, 100));
    CHECK(c.bit(0));
    CHECK(popcount(c) == 1);
    CHECK(popcount(p_hash(testing::constant_image(64, 64, 1, 0))) == 0);

    const Image img = synthetic_image("house");
    CHECK(p_hash(img) == p_hash(img));
    for (std::string_view name : kDatasetNames) {
        const Image photo = synthetic_image(name);
        CHECK(hamming_distance(p_hash(photo), p_hash(gaussian_blur(photo, 5))) <= 8);
    }
}

TEST_CASE("block mean hash")
{
    CHECK(popcount(block_mean_hash(testing::constant_image(256, 256, 1, 90))) == 0);

    Image split(256, 256, 1, 0);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 256; ++x) split.at(x, y) = 255;
    const BitHash h = block_mean_hash(split);
    CHECK(popcount(h) == 128);
    for (int i = 0; i < 128; ++i) CHECK(h.bit(i));

    const BitHash a = block_mean_hash(synthetic_image("lake"));
    const BitHash b = block_mean_hash(synthetic_image("pirate"));
    const double s = compare(AlgorithmId::BlockMean, a, b);
    CHECK(s * 256 == std::round(s * 256));
}

TEST_CASE("block mean drifts upward under heavier blur")
{
    for (std::string_view name : kDatasetNames) {
        const Image photo = synthetic_image(name, 256);
        const BitHash h = block_mean_hash(photo);
        const double light = compare(AlgorithmId::BlockMean, h, block_mean_hash(gaussian_blur(photo, 5)));
        const double heavy = compare(AlgorithmId::BlockMean, h, block_mean_hash(gaussian_blur(photo, 85)));
        CHECK_MESSAGE(heavy >= light, name);
    }
}

TEST_CASE("marr hildreth hash")
{
    CHECK(popcount(marr_hildreth_hash(testing::constant_image(100, 80, 3, 200))) == 0);
    const Image img = synthetic_image("mandrill");
    CHECK(marr_hildreth_hash(img) == marr_hildreth_hash(img));

    const LogTaps& taps = log_taps();
    CHECK(taps.gauss.size() == 15);
    CHECK(taps.second.size() == 15);
    std::int64_t sum = 0;
    for (auto t : taps.second) sum += t;
    CHECK(sum == 0);

    const double s = compare(AlgorithmId::MarrHildreth, marr_hildreth_hash(img),
                             marr_hildreth_hash(synthetic_image("plane")));
    CHECK(s * 576 == doctest::Approx(std::round(s * 576)).epsilon(1e-12));
}

TEST_CASE("radial variance hash")
{
    for (std::string_view name : {"house", "lake", "mandrill", "peppers", "woman_blonde"}) {
        const Image img = synthetic_image(name);
        const RadialDigest d = radial_variance_hash(img);
        CHECK(radial_variance_hash(flip(img, FlipAxis::Both)) == d);
        CHECK(radial_distance(d, d) == 0.0);
        CHECK(d == radial_variance_hash(img));
    }
    const Image odd = testing::noise_image(37, 23, 3, 6);
    CHECK(radial_variance_hash(flip(odd, FlipAxis::Both)) == radial_variance_hash(odd));
}

TEST_CASE("radial distance range and degenerate digests")
{
    RadialDigest flat;
    flat.features.fill(7);
    RadialDigest other = flat;
    other.features[3] = 200;
    CHECK(radial_distance(flat, flat) == 0.0);
    CHECK(radial_distance(flat, other) == 1.0);

    for (int i = 0; i < 20; ++i) {
        const auto a = radial_variance_hash(testing::noise_image(40, 40, 1, 100 + i));
        const auto b = radial_variance_hash(testing::noise_image(40, 40, 1, 200 + i));
        const double s = radial_distance(a, b);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(radial_distance(b, a) == s);
    }
}

TEST_CASE("radial beats the binary hashes on a light crop")
{
    for (std::string_view name : {"house", "lake", "mandrill", "peppers", "woman_blonde"}) {
        CAPTURE(name);
        const Image img = synthetic_image(name);
        const Image cut = crop(img, 20);
        const double radial = compare(AlgorithmId::RadialVariance, radial_variance_hash(img), radial_variance_hash(cut));
        for (AlgorithmId a : {AlgorithmId::Average, AlgorithmId::PHash, AlgorithmId::BlockMean, AlgorithmId::MarrHildreth})
            CHECK(radial < compare(a, compute_hash(a, img), compute_hash(a, cut)));
    }
}

TEST_CASE("hamming distance and normalisation")
{
    std::vector<bool> bits(64, false);
    const BitHash zeros = BitHash::from_bits(AlgorithmId::Average, bits);
    bits[3] = bits[60] = true;
    const BitHash two = BitHash::from_bits(AlgorithmId::Average, bits);
    CHECK(hamming_distance(zeros, two) == 2);
    CHECK(hamming_distance(zeros, zeros) == 0);
    CHECK(hamming_distance(zeros, complement(zeros)) == 64);
    CHECK_THROWS_AS(hamming_distance(zeros, BitHash::from_bits(AlgorithmId::PHash, bits)), DataError);

    // Triangle inequality on random hashes.
    std::mt19937 rng(1);
    for (int i = 0; i < 50; ++i) {
        auto rand_hash = [&] {
            std::vector<std::uint8_t> b(32);
            for (auto& x : b) x = static_cast<std::uint8_t>(rng());
            return BitHash(AlgorithmId::BlockMean, b);
        };
        const BitHash a = rand_hash(), b = rand_hash(), c = rand_hash();
        CHECK(hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c));
        CHECK(hamming_distance(a, b) == hamming_distance(b, a));
    }

    CHECK(normalize(0, 64) == 0.0);
    CHECK(normalize(27, 64) == 0.421875);
    CHECK(normalize(244, 576) == 0.4236111111111111);
    CHECK(normalize(86, 256) == 0.3359375);
    CHECK_THROWS_AS(normalize(1, 0), DataError);

    const BitHash h = average_hash(testing::noise_image(30, 30, 3, 3));
    CHECK(compare(AlgorithmId::Average, h, h) == 0.0);
    CHECK(compare(AlgorithmId::Average, h, complement(h)) == 1.0);
}

TEST_CASE("serialisation round trip")
{
    const Image img = synthetic_image("peppers");
    for (AlgorithmId a : kAllAlgorithms) {
        const PerceptualHash h = compute_hash(a, img);
        CHECK(algorithm_of(h) == a);
        const std::string text = serialize(h);
        CHECK(text.rfind(std::string(algorithm_name(a)) + ":", 0) == 0);
        CHECK(parse_hash(text) == h);
    }
    CHECK(serialize(BitHash::from_bits(AlgorithmId::Average, std::vector<bool>(64, true))) ==
          "AverageHash:ffffffffffffffff");
    CHECK_THROWS_AS(parse_hash("AverageHash:ff"), DataError);
    CHECK_THROWS_AS(parse_hash("NoSuchHash:00"), DataError);
    CHECK_THROWS_AS(parse_hash("AverageHash"), DataError);
    CHECK_THROWS_AS(parse_hash("AverageHash:zzzzzzzzzzzzzzzz"), DataError);
}

}  // TEST_SUITE

#include "imgchain/dataset.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "imgchain/codec.hpp"

namespace imgchain {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// std::mt19937_64 output is fully specified; distributions are not, so
// draws are derived from the raw bits.
class Rng {
public:
    explicit Rng(std::string_view seed_text)
    {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (char c : seed_text) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        engine_.seed(h);
    }

    double uniform(double lo = 0.0, double hi = 1.0)
    {
        return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    int integer(int lo, int hi) { return std::min(hi, lo + static_cast<int>(uniform() * (hi - lo + 1))); }

private:
    std::mt19937_64 engine_;
};

struct Wave {
    double fx, fy, phase, amp;
};

// Frequencies log-uniform in [min_freq, max_freq] cycles per image with
// amplitude ~ 1/f, which gives the scale-free spectrum of natural scenes.
std::vector<Wave> pink_waves(Rng& rng, int count, double min_freq, double max_freq)
{
    std::vector<Wave> waves;
    for (int i = 0; i < count; ++i) {
        const double freq = min_freq * std::pow(max_freq / min_freq, rng.uniform());
        const double angle = rng.uniform(0.0, std::numbers::pi);
        waves.push_back({freq * std::cos(angle), freq * std::sin(angle), rng.uniform(0.0, kTwoPi), 1.0 / freq});
    }
    return waves;
}

double wave_sum(const std::vector<Wave>& waves, double u, double v)
{
    double s = 0.0;
    for (const Wave& w : waves) s += w.amp * std::cos(kTwoPi * (w.fx * u + w.fy * v) + w.phase);
    return s;
}

struct Blob {
    bool ellipse;
    double cx, cy, rx, ry, ct, st, alpha;
    double color[3];
    double shade;  // brightness gradient across the shape
};

Blob random_blob(Rng& rng, double cx, double cy, double min_r, double max_r)
{
    Blob b;
    b.ellipse = rng.uniform() < 0.6;
    b.cx = cx;
    b.cy = cy;
    b.rx = rng.uniform(min_r, max_r);
    b.ry = rng.uniform(min_r, max_r);
    const double theta = rng.uniform(0.0, std::numbers::pi);
    b.ct = std::cos(theta);
    b.st = std::sin(theta);
    b.alpha = rng.uniform(0.7, 1.0);
    for (double& c : b.color) c = rng.uniform(20, 235);
    b.shade = rng.uniform(-60, 60);
    return b;
}

void paint(std::vector<double>& field, int side, const Blob& b)
{
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double u = (x + 0.5) / side - b.cx;
            const double v = (y + 0.5) / side - b.cy;
            const double p = (b.ct * u + b.st * v) / b.rx;
            const double q = (-b.st * u + b.ct * v) / b.ry;
            const bool inside = b.ellipse ? p * p + q * q <= 1.0 : std::abs(p) <= 1.0 && std::abs(q) <= 1.0;
            if (!inside) continue;
            double* px = &field[(static_cast<std::size_t>(y) * side + x) * 3];
            for (int c = 0; c < 3; ++c) px[c] = (1.0 - b.alpha) * px[c] + b.alpha * (b.color[c] + b.shade * p);
        }
}

}  // namespace

Image synthetic_image(std::string_view name, int side)
{
    Rng rng(name);
    const auto luma = pink_waves(rng, 48, 0.5, 24.0);
    const auto chroma_a = pink_waves(rng, 12, 0.5, 8.0);
    const auto chroma_b = pink_waves(rng, 12, 0.5, 8.0);
    const double sky_l = rng.uniform(150, 215);
    const double sky[3] = {sky_l + rng.uniform(-25, 25), sky_l + rng.uniform(-25, 25), sky_l + rng.uniform(-25, 25)};
    const double ground_l = rng.uniform(40, 100);
    const double ground[3] = {ground_l + rng.uniform(-25, 25), ground_l + rng.uniform(-25, 25), ground_l + rng.uniform(-25, 25)};
    // Dominant edge at a random orientation, offset from the centre.
    const double edge_angle = rng.uniform(0.0, std::numbers::pi);
    const double nx = std::cos(edge_angle), ny = std::sin(edge_angle);
    const double edge_offset = rng.uniform(-0.2, 0.2);

    std::vector<double> field(static_cast<std::size_t>(side) * side * 3);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double u = (x + 0.5) / side;
            const double v = (y + 0.5) / side;
            const double t = 1.0 / (1.0 + std::exp(-(nx * (u - 0.5) + ny * (v - 0.5) - edge_offset) * 25.0));
            const double l = 16.0 * wave_sum(luma, u, v);
            const double a = 10.0 * wave_sum(chroma_a, u, v);
            const double b = 10.0 * wave_sum(chroma_b, u, v);
            double* px = &field[(static_cast<std::size_t>(y) * side + x) * 3];
            for (int c = 0; c < 3; ++c) px[c] = (1.0 - t) * sky[c] + t * ground[c] + l;
            px[0] += a;
            px[1] += 0.5 * (b - a);
            px[2] -= b;
        }

    // Scattered background objects, then a larger subject near the centre.
    const int extras = rng.integer(4, 8);
    for (int i = 0; i < extras; ++i)
        paint(field, side, random_blob(rng, rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), 0.03, 0.12));
    const double sx = rng.uniform(0.35, 0.65);
    const double sy = rng.uniform(0.35, 0.65);
    const int parts = rng.integer(2, 4);
    for (int i = 0; i < parts; ++i)
        paint(field, side, random_blob(rng, sx + rng.uniform(-0.12, 0.12), sy + rng.uniform(-0.12, 0.12), 0.06, 0.2));

    Image img(side, side, 3);
    auto out = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = round_pixel(field[i] + rng.uniform(-4.0, 4.0));
    return img;
}

std::vector<std::filesystem::path> write_synthetic_dataset(const std::filesystem::path& dir, int side)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    for (std::string_view name : kDatasetNames) {
        paths.push_back(dir / (std::string(name) + ".png"));
        save_image(paths.back(), synthetic_image(name, side));
    }
    return paths;
}

}  // namespace imgchain

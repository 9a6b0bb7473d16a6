#include "imgchain/kernels.hpp"

#include <numbers>

namespace imgchain::kernels {

namespace {

// cos/sin with values that are zero to rounding snapped to exactly zero, so
// quarter turns map pixel centres onto pixel centres.
std::pair<double, double> unit_direction(double degrees)
{
    const double rad = degrees * std::numbers::pi / 180.0;
    double c = std::cos(rad);
    double s = std::sin(rad);
    if (std::abs(c) < 1e-12) c = 0.0;
    if (std::abs(s) < 1e-12) s = 0.0;
    return {c, s};
}

struct RotationMap {
    double cos_t;
    double sin_t;
    double src_cx;
    double src_cy;
    double dst_cx;
    double dst_cy;
};

RotationMap make_rotation(const Plane<double>& src, double degrees, int out_w, int out_h)
{
    const auto [c, s] = unit_direction(degrees);
    return {c, s, (src.width - 1) / 2.0, (src.height - 1) / 2.0, (out_w - 1) / 2.0, (out_h - 1) / 2.0};
}

// Positive angles turn the content counter-clockwise as displayed (y down).
double rotated_sample(const Plane<double>& src, const RotationMap& m, int x, int y)
{
    const double dx = x - m.dst_cx;
    const double dy = y - m.dst_cy;
    const double sx = m.src_cx + m.cos_t * dx - m.sin_t * dy;
    const double sy = m.src_cy + m.sin_t * dx + m.cos_t * dy;
    const double fx0 = std::floor(sx);
    const double fy0 = std::floor(sy);
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);
    if (x0 < -1 || y0 < -1 || x0 >= src.width || y0 >= src.height) return 0.0;
    const double fx = sx - fx0;
    const double fy = sy - fy0;

    auto pixel = [&](int px, int py) {
        return (px < 0 || py < 0 || px >= src.width || py >= src.height) ? 0.0 : src(px, py);
    };
    const double top = (1.0 - fx) * pixel(x0, y0) + fx * pixel(x0 + 1, y0);
    const double bottom = (1.0 - fx) * pixel(x0, y0 + 1) + fx * pixel(x0 + 1, y0 + 1);
    return (1.0 - fy) * top + fy * bottom;
}

// Nearest pixel(s) to centred offset u along an axis of n pixels; a tie
// between two centres returns both. Negative offsets are mirrored from
// positive ones, which makes the result odd-symmetric in u by construction
// (u - floor(u) rounds for negative u).
std::pair<int, int> nearest_on_axis(double u, int n)
{
    if (u < 0.0) {
        const auto [a, b] = nearest_on_axis(-u, n);
        return {n - 1 - b, n - 1 - a};
    }
    const double f = std::floor(u);
    const double r = u - f;  // exact for u >= 0
    const int fi = static_cast<int>(f);
    if (n % 2 == 1) {
        const int c = (n - 1) / 2;
        if (r < 0.5) return {c + fi, c + fi};
        if (r > 0.5) return {c + fi + 1, c + fi + 1};
        return {c + fi, c + fi + 1};
    }
    const int half = n / 2;
    if (r == 0.0) return {half + fi - 1, half + fi};
    return {half + fi, half + fi};
}

double line_variance(const Plane<double>& src, double degrees)
{
    const auto [c, s] = unit_direction(degrees);
    const int radius = static_cast<int>(
        std::ceil(std::sqrt(double(src.width) * src.width + double(src.height) * src.height) / 2.0));
    double sum = 0.0;
    double sum_sq = 0.0;
    int count = 0;
    for (int t = -radius; t <= radius; ++t) {
        const auto [x0, x1] = nearest_on_axis(t * c, src.width);
        const auto [y0, y1] = nearest_on_axis(t * s, src.height);
        if (x0 < 0 || y0 < 0 || x1 >= src.width || y1 >= src.height) continue;
        const double v = (src(x0, y0) + src(x1, y0) + src(x0, y1) + src(x1, y1)) * 0.25;
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    if (count == 0) return 0.0;
    const double mean = sum / count;
    const double var = sum_sq / count - mean * mean;
    return var > 0.0 ? var : 0.0;
}

}  // namespace

Plane<double> resample(const Plane<double>& src, const AxisWeights& wx, const AxisWeights& wy)
{
    const int out_w = static_cast<int>(wx.size());
    const int out_h = static_cast<int>(wy.size());
    Plane<double> tmp(out_w, src.height);
    Plane<double> dst(out_w, out_h);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (const Tap& t : wx[x]) acc += t.weight * src(t.index, y);
            tmp(x, y) = acc;
        }

#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (const Tap& t : wy[y]) acc += t.weight * tmp(x, t.index);
            dst(x, y) = acc;
        }
    return dst;
}

Plane<double> rotate_bilinear(const Plane<double>& src, double degrees, int out_w, int out_h)
{
    const RotationMap m = make_rotation(src, degrees, out_w, out_h);
    Plane<double> dst(out_w, out_h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
            dst(x, y) = rotated_sample(src, m, x, y);
    return dst;
}

std::vector<double> radial_line_variance(const Plane<double>& src, int angles)
{
    std::vector<double> out(angles);
#pragma omp parallel for schedule(dynamic, 8)
    for (int k = 0; k < angles; ++k)
        out[k] = line_variance(src, 180.0 * k / angles);
    return out;
}

namespace reference {

Plane<double> resample(const Plane<double>& src, const AxisWeights& wx, const AxisWeights& wy)
{
    Plane<double> dst(static_cast<int>(wx.size()), static_cast<int>(wy.size()));
    for (int y = 0; y < dst.height; ++y)
        for (int x = 0; x < dst.width; ++x) {
            double acc = 0.0;
            for (const Tap& ty : wy[y])
                for (const Tap& tx : wx[x])
                    acc += tx.weight * ty.weight * src(tx.index, ty.index);
            dst(x, y) = acc;
        }
    return dst;
}

Plane<double> rotate_bilinear(const Plane<double>& src, double degrees, int out_w, int out_h)
{
    const RotationMap m = make_rotation(src, degrees, out_w, out_h);
    Plane<double> dst(out_w, out_h);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
            dst(x, y) = rotated_sample(src, m, x, y);
    return dst;
}

std::vector<double> radial_line_variance(const Plane<double>& src, int angles)
{
    std::vector<double> out;
    out.reserve(angles);
    for (int k = 0; k < angles; ++k) out.push_back(line_variance(src, 180.0 * k / angles));
    return out;
}

}  // namespace reference

}  // namespace imgchain::kernels

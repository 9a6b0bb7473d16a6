#include "imgchain/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "imgchain/error.hpp"

namespace imgchain {

namespace {

kernels::AxisWeights axis_weights(int src, int dst)
{
    kernels::AxisWeights weights(dst);
    const double scale = static_cast<double>(src) / dst;
    if (dst <= src) {
        // Area coverage of [i*scale, (i+1)*scale).
        for (int i = 0; i < dst; ++i) {
            const double a = i * scale;
            const double b = (i + 1) * scale;
            const int first = static_cast<int>(std::floor(a));
            const int last = std::min(src - 1, static_cast<int>(std::ceil(b)) - 1);
            for (int j = first; j <= last; ++j) {
                const double overlap = std::min(b, j + 1.0) - std::max(a, static_cast<double>(j));
                if (overlap > 0.0) weights[i].push_back({j, overlap / scale});
            }
        }
    } else {
        for (int i = 0; i < dst; ++i) {
            const double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, src - 1.0);
            const int i0 = static_cast<int>(std::floor(s));
            const double f = s - i0;
            weights[i].push_back({i0, 1.0 - f});
            if (f > 0.0) weights[i].push_back({std::min(i0 + 1, src - 1), f});
        }
    }
    return weights;
}

std::vector<double> cosine_basis(int n)
{
    std::vector<double> basis(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i)
            basis[static_cast<std::size_t>(k) * n + i] =
                scale * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
    return basis;
}

// out = B * in * B^T (forward) or B^T * in * B (inverse).
Matrix apply_basis(const Matrix& in, bool inverse)
{
    if (in.width != in.height || in.width < 1)
        throw DataError("DCT input must be a non-empty square matrix, got " + std::to_string(in.width) + "x" +
                        std::to_string(in.height));
    const int n = in.width;
    const auto basis = cosine_basis(n);
    auto b = [&](int r, int c) { return inverse ? basis[static_cast<std::size_t>(c) * n + r]
                                                : basis[static_cast<std::size_t>(r) * n + c]; };
    Matrix tmp(n, n);
    Matrix out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += b(r, k) * in(c, k);
            tmp(c, r) = acc;
        }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += tmp(k, r) * b(c, k);
            out(c, r) = acc;
        }
    return out;
}

}  // namespace

Matrix to_plane(const Image& img, int channel)
{
    Matrix plane(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) plane(x, y) = img.at(x, y, channel);
    return plane;
}

void from_plane(const Matrix& plane, Image& img, int channel)
{
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) img.at(x, y, channel) = round_pixel(plane(x, y));
}

Image to_grayscale(const Image& img)
{
    if (img.channels() == 1) return img;
    Image gray(img.width(), img.height(), 1);
    const auto src = img.pixels();
    auto dst = gray.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const int r = src[3 * i];
        const int g = src[3 * i + 1];
        const int b = src[3 * i + 2];
        dst[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
    return gray;
}

Image resize(const Image& img, int width, int height)
{
    if (width < 1 || height < 1)
        throw DataError("resize target must be at least 1x1, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    if (width == img.width() && height == img.height()) return img;
    const auto wx = axis_weights(img.width(), width);
    const auto wy = axis_weights(img.height(), height);
    Image out(width, height, img.channels());
    for (int c = 0; c < img.channels(); ++c)
        from_plane(kernels::resample(to_plane(img, c), wx, wy), out, c);
    return out;
}

Matrix dct2(const Matrix& block) { return apply_basis(block, false); }

Matrix idct2(const Matrix& coeffs) { return apply_basis(coeffs, true); }

std::vector<double> dct1(const std::vector<double>& signal)
{
    const int n = static_cast<int>(signal.size());
    if (n == 0) return {};
    const auto basis = cosine_basis(n);
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += basis[static_cast<std::size_t>(k) * n + i] * signal[i];
        out[k] = acc;
    }
    return out;
}

int blur_kernel_size(int width, int height, double strength_pct)
{
    if (!(strength_pct > 0.0 && strength_pct < 100.0))
        throw DataError("blur strength must be in (0, 100) percent, got " + std::to_string(strength_pct));
    int k = static_cast<int>(std::floor(strength_pct * std::min(width, height) / 100.0));
    if (k % 2 == 0) --k;
    return std::max(k, 3);
}

double blur_sigma(int kernel_size) { return 0.3 * ((kernel_size - 1) / 2.0 - 1.0) + 0.8; }

Image gaussian_blur(const Image& img, double strength_pct)
{
    const int k = blur_kernel_size(img.width(), img.height(), strength_pct);
    const double sigma = blur_sigma(k);
    std::vector<double> taps(k);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = i - k / 2;
        taps[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        total += taps[i];
    }
    for (double& t : taps) t /= total;

    Image out(img.width(), img.height(), img.channels());
    for (int c = 0; c < img.channels(); ++c)
        from_plane(kernels::convolve_separable<double>(to_plane(img, c), taps, taps), out, c);
    return out;
}

Image rotate(const Image& img, double degrees, RotateOptions options)
{
    int out_w = img.width();
    int out_h = img.height();
    if (options.expand) {
        const double rad = degrees * std::numbers::pi / 180.0;
        const double c = std::abs(std::cos(rad));
        const double s = std::abs(std::sin(rad));
        out_w = std::max(1, static_cast<int>(std::lround(img.width() * c + img.height() * s)));
        out_h = std::max(1, static_cast<int>(std::lround(img.width() * s + img.height() * c)));
    }
    Image out(out_w, out_h, img.channels());
    for (int c = 0; c < img.channels(); ++c)
        from_plane(kernels::rotate_bilinear(to_plane(img, c), degrees, out_w, out_h), out, c);
    return out;
}

Image crop(const Image& img, double pct, CropAnchor anchor)
{
    if (!(pct > 0.0 && pct < 100.0))
        throw DataError("crop percentage must be in (0, 100), got " + std::to_string(pct));
    const int w = static_cast<int>(std::floor(img.width() * (100.0 - pct) / 100.0 + 0.5));
    const int h = static_cast<int>(std::floor(img.height() * (100.0 - pct) / 100.0 + 0.5));
    if (w < 1 || h < 1)
        throw DataError("crop of " + std::to_string(pct) + "% leaves no pixels of a " + std::to_string(img.width()) +
                        "x" + std::to_string(img.height()) + " image");
    const int x0 = anchor == CropAnchor::Center ? (img.width() - w) / 2 : 0;
    const int y0 = anchor == CropAnchor::Center ? (img.height() - h) / 2 : 0;
    Image out(w, h, img.channels());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
    return out;
}

Image flip(const Image& img, FlipAxis axis)
{
    const bool mirror_x = axis != FlipAxis::V;
    const bool mirror_y = axis != FlipAxis::H;
    Image out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const int sx = mirror_x ? img.width() - 1 - x : x;
            const int sy = mirror_y ? img.height() - 1 - y : y;
            for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(sx, sy, c);
        }
    return out;
}

}  // namespace imgchain

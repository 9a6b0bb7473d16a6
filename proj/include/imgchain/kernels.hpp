#pragma once

// Data-parallel pixel kernels. The functions in `kernels` are the OpenMP
// versions used by the library; `kernels::reference` holds plain serial
// implementations (direct 2-D sums, linear scans) that the tests and the
// benchmark compare against.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace imgchain::kernels {

template <typename T>
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Plane() = default;
    Plane(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill)
    {
    }

    T& operator()(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    const T& operator()(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const Plane&, const Plane&) = default;
};

// One output sample of a 1-D resampling: weighted sum over source indices.
struct Tap {
    int index;
    double weight;
};
using AxisWeights = std::vector<std::vector<Tap>>;

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// Separable correlation with replicated borders. Taps are centred; their
// count must be odd. Works for double and int64 planes (exact for integers).
template <typename T>
Plane<T> convolve_separable(const Plane<T>& src, std::span<const T> row_taps, std::span<const T> col_taps)
{
    const int w = src.width;
    const int h = src.height;
    const int rx = static_cast<int>(row_taps.size()) / 2;
    const int ry = static_cast<int>(col_taps.size()) / 2;
    Plane<T> tmp(w, h);
    Plane<T> dst(w, h);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            T acc{};
            for (int k = -rx; k <= rx; ++k)
                acc += row_taps[k + rx] * src(clamp_index(x + k, w), y);
            tmp(x, y) = acc;
        }
    }

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            T acc{};
            for (int k = -ry; k <= ry; ++k)
                acc += col_taps[k + ry] * tmp(x, clamp_index(y + k, h));
            dst(x, y) = acc;
        }
    }
    return dst;
}

// Horizontal pass with `wx`, then vertical pass with `wy`.
Plane<double> resample(const Plane<double>& src, const AxisWeights& wx, const AxisWeights& wy);

// Bilinear inverse mapping about the image centres; samples falling outside
// the source contribute black. Output canvas is out_w x out_h.
Plane<double> rotate_bilinear(const Plane<double>& src, double degrees, int out_w, int out_h);

// Variance of the nearest-pixel samples along `angles` lines through the
// centre, line k at k*180/angles degrees. Exactly invariant under a 180
// degree rotation of the input: ties between pixel centres average both.
std::vector<double> radial_line_variance(const Plane<double>& src, int angles);

// Smallest n in [begin, end) with pred(n), scanning in windows so the
// answer is the same for any thread count.
template <typename Pred>
std::optional<std::uint64_t> find_first(std::uint64_t begin, std::uint64_t end, Pred pred,
                                        std::uint64_t window = 4096)
{
    for (std::uint64_t lo = begin; lo < end;) {
        const std::uint64_t hi = end - lo > window ? lo + window : end;
        std::uint64_t best = UINT64_MAX;
        const auto count = static_cast<std::int64_t>(hi - lo);
#pragma omp parallel for schedule(static) reduction(min : best)
        for (std::int64_t i = 0; i < count; ++i) {
            const std::uint64_t n = lo + static_cast<std::uint64_t>(i);
            if (n < best && pred(n)) best = n;
        }
        if (best != UINT64_MAX) return best;
        lo = hi;
    }
    return std::nullopt;
}

namespace reference {

// Direct 2-D correlation with a (2r+1)x(2r+1) kernel, replicated borders.
template <typename T>
Plane<T> convolve2d(const Plane<T>& src, const Plane<T>& kernel)
{
    const int rx = kernel.width / 2;
    const int ry = kernel.height / 2;
    Plane<T> dst(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            T acc{};
            for (int j = -ry; j <= ry; ++j)
                for (int i = -rx; i <= rx; ++i)
                    acc += kernel(i + rx, j + ry) *
                           src(clamp_index(x + i, src.width), clamp_index(y + j, src.height));
            dst(x, y) = acc;
        }
    }
    return dst;
}

// Each output sample is the full 2-D weighted sum of its source taps.
Plane<double> resample(const Plane<double>& src, const AxisWeights& wx, const AxisWeights& wy);

Plane<double> rotate_bilinear(const Plane<double>& src, double degrees, int out_w, int out_h);

std::vector<double> radial_line_variance(const Plane<double>& src, int angles);

template <typename Pred>
std::optional<std::uint64_t> find_first(std::uint64_t begin, std::uint64_t end, Pred pred)
{
    for (std::uint64_t n = begin; n < end; ++n)
        if (pred(n)) return n;
    return std::nullopt;
}

}  // namespace reference

}  // namespace imgchain::kernels

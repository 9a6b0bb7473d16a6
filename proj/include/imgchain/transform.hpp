#pragma once

#include <vector>

#include "imgchain/image.hpp"
#include "imgchain/kernels.hpp"

namespace imgchain {

using Matrix = kernels::Plane<double>;

// BT.601 luma, rounded half up. Gray input is returned unchanged.
Image to_grayscale(const Image& img);

// Area averaging on a shrinking axis, bilinear (pixel-centre aligned) on an
// enlarging one. Same-size resize is the identity.
Image resize(const Image& img, int width, int height);

// Orthonormal DCT-II of a square matrix and its inverse.
Matrix dct2(const Matrix& block);
Matrix idct2(const Matrix& coeffs);
// Orthonormal 1-D DCT-II.
std::vector<double> dct1(const std::vector<double>& signal);

// Kernel size used for a blur of `strength_pct` percent of the shorter side.
int blur_kernel_size(int width, int height, double strength_pct);
// sigma = 0.3 * ((k - 1) / 2 - 1) + 0.8
double blur_sigma(int kernel_size);
Image gaussian_blur(const Image& img, double strength_pct);

struct RotateOptions {
    bool expand = false;  // grow the canvas to the rotated bounding box
};
Image rotate(const Image& img, double degrees, RotateOptions options = {});

enum class CropAnchor { Center, TopLeft };
Image crop(const Image& img, double pct, CropAnchor anchor = CropAnchor::Center);

Image flip(const Image& img, FlipAxis axis);

// Channel c of an image as a real-valued plane, and back (rounded half up).
Matrix to_plane(const Image& img, int channel = 0);
void from_plane(const Matrix& plane, Image& img, int channel = 0);

}  // namespace imgchain

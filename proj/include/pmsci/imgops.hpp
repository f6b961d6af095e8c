#pragma once

#include <cstdint>

#include "pmsci/matrix.hpp"

namespace pmsci {

// Rounds half away from zero and clamps to [0, 255].
std::uint8_t quantize_u8(double v);

// Elementwise quantize_u8, result kept as doubles.
Matrix quantize_image(const Matrix& img);

// Centered sub-image with b pixels removed from each side.
// Requires rows > 2b and cols > 2b.
Image trim_border(const Image& img, int b);

// 10*log10(255^2 / MSE); +infinity when the images are identical.
double psnr(const Image& a, const Image& b);

// Manipulated pixel rate: percentage of coordinates whose 8-bit
// quantized values differ.
double mpr(const Image& a, const Image& b);

// Separable 3x3 binomial low-pass ([1 2 1]/4 per axis), mirrored borders.
Image binomial3_filter(const Image& img);

}  // namespace pmsci

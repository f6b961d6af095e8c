#pragma once

#include "pmsci/matrix.hpp"

namespace pmsci {

inline constexpr double kDefaultSigma0 = 3.0;  // 8-bit units

// Wavelet noise residue W = L - denoiser(L). The denoiser is a 4-level
// Daubechies-8 decomposition with adaptive Wiener shrinkage of the detail
// bands: the local signal variance is estimated over sliding windows of
// sizes {3,5,7,9} (minimum across sizes) and each coefficient is scaled by
// var/(var + sigma0^2); the approximation band passes through.
NoiseResidue extract_residue(const Image& img, double sigma0 = kDefaultSigma0);

// The denoised image D(L) itself; extract_residue returns img - denoise_image(img).
Image denoise_image(const Image& img, double sigma0 = kDefaultSigma0);

}  // namespace pmsci

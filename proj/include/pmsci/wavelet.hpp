#pragma once

#include <vector>

#include "pmsci/matrix.hpp"

namespace pmsci {

// One level of a separable 2-D decomposition. ll is the approximation,
// lh/hl/hh the horizontal/vertical/diagonal detail bands.
struct WaveletBands {
    Matrix ll, lh, hl, hh;
};

// Multi-level decomposition of a mirror-padded image. levels[0] is the
// finest scale; levels.back().ll is the coarse approximation that inverse()
// consumes. Padding offsets are kept so crop() can recover the original
// frame after reconstruction.
class WaveletPyramid {
public:
    std::vector<WaveletBands> levels;
    int orig_rows = 0, orig_cols = 0;
    int pad_top = 0, pad_left = 0;

    Matrix reconstruct() const;  // padded-size image
    Matrix reconstruct_cropped() const;
};

// Orthonormal Daubechies 8-tap decomposition. The image is mirror-padded to
// a multiple of 2^levels with at least filter-length margin per side, then
// transformed with the periodized filter bank (exact reconstruction); the
// pad is dropped after the inverse.
WaveletPyramid wavelet_decompose(const Matrix& img, int levels);

// Exposed for the reconstruction tests.
void dwt_periodic_1d(const double* x, int n, double* lo, double* hi);
void idwt_periodic_1d(const double* lo, const double* hi, int n, double* x);

}  // namespace pmsci

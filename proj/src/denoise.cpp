#include "pmsci/denoise.hpp"

#include <algorithm>
#include <array>

#include "pmsci/wavelet.hpp"

namespace pmsci {

namespace {

constexpr int kLevels = 4;
constexpr std::array<int, 4> kWindowSizes = {3, 5, 7, 9};

int mirror_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// Local means of band^2 for every window size come from one summed-area
// table over the mirror-extended squared band.
void wiener_shrink_band(Matrix& band, double noise_var) {
    const int rows = band.rows(), cols = band.cols();
    const int pad = kWindowSizes.back() / 2;
    const int erows = rows + 2 * pad, ecols = cols + 2 * pad;

    std::vector<double> integral(static_cast<std::size_t>(erows + 1) * (ecols + 1), 0.0);
    auto at = [&](int r, int c) -> double& {
        return integral[static_cast<std::size_t>(r) * (ecols + 1) + c];
    };
    for (int r = 0; r < erows; ++r) {
        const int sr = mirror_index(r - pad, rows);
        for (int c = 0; c < ecols; ++c) {
            const double v = band(sr, mirror_index(c - pad, cols));
            at(r + 1, c + 1) = v * v + at(r, c + 1) + at(r + 1, c) - at(r, c);
        }
    }

    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double var = -1.0;
            for (int w : kWindowSizes) {
                const int h = w / 2;
                const int r0 = r + pad - h, c0 = c + pad - h;
                const double sum =
                    at(r0 + w, c0 + w) - at(r0, c0 + w) - at(r0 + w, c0) + at(r0, c0);
                const double est = std::max(0.0, sum / (w * w) - noise_var);
                if (var < 0.0 || est < var) var = est;
            }
            band(r, c) *= var / (var + noise_var);
        }
    }
}

}  // namespace

Image denoise_image(const Image& img, double sigma0) {
    if (img.rows() < 32 || img.cols() < 32) {
        throw std::invalid_argument("denoise: image must be at least 32x32, got " +
                                    std::to_string(img.rows()) + "x" +
                                    std::to_string(img.cols()));
    }
    if (!(sigma0 > 0.0)) {
        throw std::invalid_argument("denoise: sigma0 must be positive");
    }

    WaveletPyramid pyr = wavelet_decompose(img, kLevels);
    // The transform is orthonormal, so white noise of variance sigma0^2 has
    // the same variance in every band.
    const double noise_var = sigma0 * sigma0;
    for (WaveletBands& bands : pyr.levels) {
        wiener_shrink_band(bands.lh, noise_var);
        wiener_shrink_band(bands.hl, noise_var);
        wiener_shrink_band(bands.hh, noise_var);
    }
    return pyr.reconstruct_cropped();
}

NoiseResidue extract_residue(const Image& img, double sigma0) {
    Image den = denoise_image(img, sigma0);
    NoiseResidue res(img.rows(), img.cols());
    for (std::size_t i = 0; i < img.size(); ++i) {
        res.values()[i] = img.values()[i] - den.values()[i];
    }
    return res;
}

}  // namespace pmsci

#include "pmsci/wavelet.hpp"

#include <array>

namespace pmsci {

namespace {

// Daubechies 8-tap scaling filter (sums to sqrt(2)).
constexpr std::array<double, 8> kRecLo = {
    0.23037781330885523,  0.71484657055254153,  0.63088076792959036,
    -0.02798376941698385, -0.18703481171888114, 0.03084138183598697,
    0.03288301166698295,  -0.01059740178499728};

constexpr int kTaps = 8;

struct FilterBank {
    std::array<double, 8> dec_lo{}, dec_hi{}, rec_lo{}, rec_hi{};
    FilterBank() {
        for (int k = 0; k < kTaps; ++k) {
            rec_lo[k] = kRecLo[k];
            rec_hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * kRecLo[kTaps - 1 - k];
        }
        for (int k = 0; k < kTaps; ++k) {
            dec_lo[k] = rec_lo[kTaps - 1 - k];
            dec_hi[k] = rec_hi[kTaps - 1 - k];
        }
    }
};

const FilterBank& bank() {
    static const FilterBank fb;
    return fb;
}

// Mirror (half-point symmetric) index into [0, n).
int mirror_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

int padded_dim(int d, int levels) {
    const int unit = 1 << levels;
    int target = d + 2 * kTaps;  // mirror margin on top of the original frame
    if (target % unit != 0) target += unit - target % unit;
    return target;
}

// Column DWT over every column of `in`, writing half-height lo/hi blocks.
void dwt_columns(const Matrix& in, Matrix& lo, Matrix& hi) {
    const int n = in.rows(), half = n / 2, cols = in.cols();
    std::vector<double> colbuf(static_cast<std::size_t>(n));
    std::vector<double> lobuf(static_cast<std::size_t>(half)),
        hibuf(static_cast<std::size_t>(half));
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < n; ++r) colbuf[static_cast<std::size_t>(r)] = in(r, c);
        dwt_periodic_1d(colbuf.data(), n, lobuf.data(), hibuf.data());
        for (int r = 0; r < half; ++r) {
            lo(r, c) = lobuf[static_cast<std::size_t>(r)];
            hi(r, c) = hibuf[static_cast<std::size_t>(r)];
        }
    }
}

void idwt_columns(const Matrix& lo, const Matrix& hi, Matrix& out) {
    const int half = lo.rows(), n = half * 2, cols = lo.cols();
    std::vector<double> colbuf(static_cast<std::size_t>(n));
    std::vector<double> lobuf(static_cast<std::size_t>(half)),
        hibuf(static_cast<std::size_t>(half));
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < half; ++r) {
            lobuf[static_cast<std::size_t>(r)] = lo(r, c);
            hibuf[static_cast<std::size_t>(r)] = hi(r, c);
        }
        idwt_periodic_1d(lobuf.data(), hibuf.data(), n, colbuf.data());
        for (int r = 0; r < n; ++r) out(r, c) = colbuf[static_cast<std::size_t>(r)];
    }
}

WaveletBands decompose_level(const Matrix& in) {
    const int rows = in.rows(), cols = in.cols();
    const int hr = rows / 2, hc = cols / 2;

    // rows first
    Matrix rowlo(rows, hc), rowhi(rows, hc);
    std::vector<double> lobuf(static_cast<std::size_t>(hc)),
        hibuf(static_cast<std::size_t>(hc));
    for (int r = 0; r < rows; ++r) {
        dwt_periodic_1d(in.data() + static_cast<std::size_t>(r) * cols, cols, lobuf.data(),
                        hibuf.data());
        for (int c = 0; c < hc; ++c) {
            rowlo(r, c) = lobuf[static_cast<std::size_t>(c)];
            rowhi(r, c) = hibuf[static_cast<std::size_t>(c)];
        }
    }

    WaveletBands bands{Matrix(hr, hc), Matrix(hr, hc), Matrix(hr, hc), Matrix(hr, hc)};
    dwt_columns(rowlo, bands.ll, bands.lh);
    dwt_columns(rowhi, bands.hl, bands.hh);
    return bands;
}

Matrix reconstruct_level(const WaveletBands& bands) {
    const int hr = bands.ll.rows(), hc = bands.ll.cols();
    const int rows = hr * 2, cols = hc * 2;

    Matrix rowlo(rows, hc), rowhi(rows, hc);
    idwt_columns(bands.ll, bands.lh, rowlo);
    idwt_columns(bands.hl, bands.hh, rowhi);

    Matrix out(rows, cols);
    std::vector<double> lobuf(static_cast<std::size_t>(hc)),
        hibuf(static_cast<std::size_t>(hc));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < hc; ++c) {
            lobuf[static_cast<std::size_t>(c)] = rowlo(r, c);
            hibuf[static_cast<std::size_t>(c)] = rowhi(r, c);
        }
        idwt_periodic_1d(lobuf.data(), hibuf.data(), cols,
                         out.data() + static_cast<std::size_t>(r) * cols);
    }
    return out;
}

}  // namespace

void dwt_periodic_1d(const double* x, int n, double* lo, double* hi) {
    const FilterBank& fb = bank();
    const int half = n / 2;
    for (int i = 0; i < half; ++i) {
        double a = 0.0, d = 0.0;
        for (int j = 0; j < kTaps; ++j) {
            int t = 2 * i + 1 - j;
            t %= n;
            if (t < 0) t += n;
            a += fb.dec_lo[static_cast<std::size_t>(j)] * x[t];
            d += fb.dec_hi[static_cast<std::size_t>(j)] * x[t];
        }
        lo[i] = a;
        hi[i] = d;
    }
}

void idwt_periodic_1d(const double* lo, const double* hi, int n, double* x) {
    // The periodized bank is orthonormal, so synthesis is the transpose of
    // the analysis operator.
    const FilterBank& fb = bank();
    const int half = n / 2;
    for (int t = 0; t < n; ++t) x[t] = 0.0;
    for (int i = 0; i < half; ++i) {
        for (int j = 0; j < kTaps; ++j) {
            int t = 2 * i + 1 - j;
            t %= n;
            if (t < 0) t += n;
            x[t] += fb.dec_lo[static_cast<std::size_t>(j)] * lo[i] +
                    fb.dec_hi[static_cast<std::size_t>(j)] * hi[i];
        }
    }
}

WaveletPyramid wavelet_decompose(const Matrix& img, int levels) {
    if (levels < 1) throw std::invalid_argument("wavelet_decompose: levels must be >= 1");
    const int min_dim = 1 << levels;
    if (img.rows() < min_dim || img.cols() < min_dim) {
        throw std::invalid_argument("wavelet_decompose: image too small for " +
                                    std::to_string(levels) + " levels");
    }

    WaveletPyramid pyr;
    pyr.orig_rows = img.rows();
    pyr.orig_cols = img.cols();
    const int prows = padded_dim(img.rows(), levels);
    const int pcols = padded_dim(img.cols(), levels);
    pyr.pad_top = (prows - img.rows()) / 2;
    pyr.pad_left = (pcols - img.cols()) / 2;

    Matrix padded(prows, pcols);
    for (int r = 0; r < prows; ++r) {
        const int sr = mirror_index(r - pyr.pad_top, img.rows());
        for (int c = 0; c < pcols; ++c) {
            padded(r, c) = img(sr, mirror_index(c - pyr.pad_left, img.cols()));
        }
    }

    Matrix current = std::move(padded);
    pyr.levels.reserve(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        WaveletBands bands = decompose_level(current);
        current = bands.ll;
        pyr.levels.push_back(std::move(bands));
    }
    return pyr;
}

Matrix WaveletPyramid::reconstruct() const {
    Matrix current = levels.back().ll;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        WaveletBands bands = *it;
        bands.ll = std::move(current);
        current = reconstruct_level(bands);
    }
    return current;
}

Matrix WaveletPyramid::reconstruct_cropped() const {
    Matrix padded = reconstruct();
    Matrix out(orig_rows, orig_cols);
    for (int r = 0; r < orig_rows; ++r) {
        for (int c = 0; c < orig_cols; ++c) {
            out(r, c) = padded(r + pad_top, c + pad_left);
        }
    }
    return out;
}

}  // namespace pmsci

#include "pmsci/imgops.hpp"

#include <cmath>
#include <limits>

namespace pmsci {

std::uint8_t quantize_u8(double v) {
    double r = std::round(v);  // halfway cases away from zero
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

Matrix quantize_image(const Matrix& img) {
    Matrix out(img.rows(), img.cols());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.values()[i] = static_cast<double>(quantize_u8(img.values()[i]));
    }
    return out;
}

Image trim_border(const Image& img, int b) {
    if (b < 0) throw std::invalid_argument("trim_border: negative border");
    if (b == 0) return img;
    if (img.rows() <= 2 * b || img.cols() <= 2 * b) {
        throw std::invalid_argument("trim_border: image " + std::to_string(img.rows()) + "x" +
                                    std::to_string(img.cols()) + " too small for border " +
                                    std::to_string(b));
    }
    Image out(img.rows() - 2 * b, img.cols() - 2 * b);
    for (int r = 0; r < out.rows(); ++r) {
        for (int c = 0; c < out.cols(); ++c) {
            out(r, c) = img(r + b, c + b);
        }
    }
    return out;
}

double psnr(const Image& a, const Image& b) {
    require_same_shape(a, b, "psnr");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.values()[i] - b.values()[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double mpr(const Image& a, const Image& b) {
    require_same_shape(a, b, "mpr");
    std::size_t changed = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (quantize_u8(a.values()[i]) != quantize_u8(b.values()[i])) ++changed;
    }
    return 100.0 * static_cast<double>(changed) / static_cast<double>(a.size());
}

Image binomial3_filter(const Image& img) {
    static const double k[3] = {0.25, 0.5, 0.25};
    const int rows = img.rows(), cols = img.cols();
    auto mirror = [](int i, int n) { return i < 0 ? -i - 1 : (i >= n ? 2 * n - 1 - i : i); };
    Image tmp(rows, cols), out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int j = -1; j <= 1; ++j) s += k[j + 1] * img(r, mirror(c + j, cols));
            tmp(r, c) = s;
        }
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int j = -1; j <= 1; ++j) s += k[j + 1] * tmp(mirror(r + j, rows), c);
            out(r, c) = s;
        }
    }
    return out;
}

}  // namespace pmsci

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmsci {

// Row-major grid of doubles. Images, noise residues and fingerprint
// estimates all share this representation; pixel data stays in double
// precision until it hits a file.
class Matrix {
public:
    Matrix() = default;

    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {
        if (rows <= 0 || cols <= 0) {
            throw std::invalid_argument("Matrix: dimensions must be positive, got " +
                                        std::to_string(rows) + "x" + std::to_string(cols));
        }
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int r, int c) { return data_[idx(r, c)]; }
    double operator()(int r, int c) const { return data_[idx(r, c)]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// 2-D luminance matrix, nominal range [0, 255].
using Image = Matrix;

// Per-image wavelet residue W = L - denoiser(L).
using NoiseResidue = Matrix;

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch, " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
    }
}

inline double mean_of(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v;
    return s / static_cast<double>(m.size());
}

}  // namespace pmsci

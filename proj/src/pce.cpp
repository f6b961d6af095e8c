#include "pmsci/pce.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace pmsci {

namespace {

// FFTW plan creation is not thread-safe; execution of distinct plans is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct FftwReal {
    double* p = nullptr;
    explicit FftwReal(std::size_t n) : p(fftw_alloc_real(n)) {}
    ~FftwReal() { fftw_free(p); }
    FftwReal(const FftwReal&) = delete;
    FftwReal& operator=(const FftwReal&) = delete;
};

struct FftwComplex {
    fftw_complex* p = nullptr;
    explicit FftwComplex(std::size_t n) : p(fftw_alloc_complex(n)) {}
    ~FftwComplex() { fftw_free(p); }
    FftwComplex(const FftwComplex&) = delete;
    FftwComplex& operator=(const FftwComplex&) = delete;
};

// Circular cross-correlation, surface(d) = sum_x a(x) * b(x + d).
Matrix cross_correlate_fft(const Matrix& a, const Matrix& b) {
    const int rows = a.rows(), cols = a.cols();
    const std::size_t n_real = static_cast<std::size_t>(rows) * cols;
    const std::size_t n_spec = static_cast<std::size_t>(rows) * (cols / 2 + 1);

    FftwReal in(n_real), out(n_real);
    FftwComplex fa(n_spec), fb(n_spec);

    fftw_plan fwd_a, fwd_b, inv;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd_a = fftw_plan_dft_r2c_2d(rows, cols, in.p, fa.p, FFTW_ESTIMATE);
        fwd_b = fftw_plan_dft_r2c_2d(rows, cols, in.p, fb.p, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_2d(rows, cols, fa.p, out.p, FFTW_ESTIMATE);
    }

    std::copy(a.values().begin(), a.values().end(), in.p);
    fftw_execute(fwd_a);
    std::copy(b.values().begin(), b.values().end(), in.p);
    fftw_execute(fwd_b);

    // conj(A) .* B, inverse transform then 1/(R*C) normalization
    for (std::size_t i = 0; i < n_spec; ++i) {
        const double ar = fa.p[i][0], ai = fa.p[i][1];
        const double br = fb.p[i][0], bi = fb.p[i][1];
        fa.p[i][0] = ar * br + ai * bi;
        fa.p[i][1] = ar * bi - ai * br;
    }
    fftw_execute(inv);

    Matrix surface(rows, cols);
    const double scale = 1.0 / static_cast<double>(n_real);
    for (std::size_t i = 0; i < n_real; ++i) surface.values()[i] = out.p[i] * scale;

    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd_a);
        fftw_destroy_plan(fwd_b);
        fftw_destroy_plan(inv);
    }
    return surface;
}

// Mean-subtract and return the L2 norm of the result.
double center(Matrix& m) {
    const double mean = mean_of(m);
    double norm2 = 0.0;
    for (double& v : m.values()) {
        v -= mean;
        norm2 += v * v;
    }
    return std::sqrt(norm2);
}

}  // namespace

Matrix ncc_surface(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "ncc_surface");
    Matrix ac = a, bc = b;
    const double na = center(ac);
    const double nb = center(bc);
    if (na == 0.0 || nb == 0.0) {
        throw std::invalid_argument("ncc_surface: constant input has no correlation");
    }
    Matrix surface = cross_correlate_fft(ac, bc);
    const double scale = 1.0 / (na * nb);
    for (double& v : surface.values()) v *= scale;
    return surface;
}

PceResult pce_from_surface(const Matrix& surface, const PceOptions& opts) {
    const int rows = surface.rows(), cols = surface.cols();
    if (opts.exclusion < 1 || opts.exclusion % 2 == 0) {
        throw std::invalid_argument("pce: exclusion window must be odd and positive");
    }
    const long long window = static_cast<long long>(opts.exclusion) * opts.exclusion;
    const long long cells = static_cast<long long>(rows) * cols;
    if (cells <= window) {
        throw std::invalid_argument("pce: surface smaller than the exclusion window");
    }

    PceResult res;
    if (opts.search_peak) {
        double best = -1.0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double v = std::fabs(surface(r, c));
                if (v > best) {
                    best = v;
                    res.peak_row = r;
                    res.peak_col = c;
                }
            }
        }
    }
    res.peak_corr = surface(res.peak_row, res.peak_col);

    double total = 0.0;
    for (const double v : surface.values()) total += v * v;
    double excluded = 0.0;
    const int half = opts.exclusion / 2;
    for (int dr = -half; dr <= half; ++dr) {
        const int r = ((res.peak_row + dr) % rows + rows) % rows;
        for (int dc = -half; dc <= half; ++dc) {
            const int c = ((res.peak_col + dc) % cols + cols) % cols;
            const double v = surface(r, c);
            excluded += v * v;
        }
    }
    res.energy = (total - excluded) / static_cast<double>(cells - window);
    const double sign = res.peak_corr < 0.0 ? -1.0 : 1.0;
    res.pce = res.energy > 0.0 ? sign * res.peak_corr * res.peak_corr / res.energy : 0.0;
    return res;
}

PceResult pce_match(const Matrix& candidate, const Fingerprint& reference,
                    const Matrix* image, const PceOptions& opts) {
    require_same_shape(candidate, reference.data, "pce");
    if (image == nullptr) {
        return pce_from_surface(ncc_surface(candidate, reference.data), opts);
    }
    require_same_shape(*image, reference.data, "pce");
    Matrix term(image->rows(), image->cols());
    for (std::size_t i = 0; i < term.size(); ++i) {
        term.values()[i] = image->values()[i] * reference.data.values()[i];
    }
    return pce_from_surface(ncc_surface(candidate, term), opts);
}

PceResult pce_of_set(const std::vector<std::string>& paths, const Fingerprint& query,
                     const EstimateOptions& opts, const PceOptions& pce_opts) {
    Fingerprint fs = generate_fingerprint(paths, opts);
    return pce_match(fs.data, query, nullptr, pce_opts);
}

}  // namespace pmsci

#pragma once

#include <string>
#include <vector>

#include "pmsci/fingerprint.hpp"
#include "pmsci/matrix.hpp"

namespace pmsci {

// PRNU similarity threshold used throughout; CLI-overridable.
inline constexpr double kDefaultTau = 50.0;

// Side of the square window removed around the correlation peak when the
// off-peak energy is estimated.
inline constexpr int kPeakExclusion = 11;

struct PceResult {
    double pce = 0.0;        // sign(peak_corr) * peak_corr^2 / energy
    int peak_row = 0;        // peak location used for the statistic
    int peak_col = 0;
    double peak_corr = 0.0;  // signed normalized correlation at the peak
    double energy = 0.0;     // mean squared correlation outside the window
};

struct PceOptions {
    int exclusion = kPeakExclusion;
    // Same-camera same-crop comparisons need no shift search: the peak is
    // read at (0,0) and the null statistic is chi-square-like (the paper's
    // per-image values, e.g. negative ones, only arise this way). Searching
    // the whole surface for the largest |correlation| is available for
    // exploratory use; its null floor is the max over R*C cells.
    bool search_peak = false;
};

// Normalized circular cross-correlation for every cyclic shift:
//   surface(dr, dc) = sum_x a0(x) * b0(x + d) / (|a0| * |b0|)
// with a0, b0 the mean-subtracted inputs. surface(0,0) is the plain
// normalized correlation. Throws on constant input.
Matrix ncc_surface(const Matrix& a, const Matrix& b);

// Peak-to-correlation energy of an already computed surface.
PceResult pce_from_surface(const Matrix& surface, const PceOptions& opts = {});

// PCE between a residue (or candidate fingerprint) and a reference
// fingerprint. When `image` is given the reference term is image .* F as in
// the sensor model; without it the fingerprint is correlated directly
// (fingerprint-vs-fingerprint mode).
PceResult pce_match(const Matrix& candidate, const Fingerprint& reference,
                    const Matrix* image = nullptr, const PceOptions& opts = {});

// "PCE of S": fingerprint the image set, then fingerprint-vs-fingerprint
// PCE against the query fingerprint.
PceResult pce_of_set(const std::vector<std::string>& paths, const Fingerprint& query,
                     const EstimateOptions& opts = {}, const PceOptions& pce_opts = {});

}  // namespace pmsci

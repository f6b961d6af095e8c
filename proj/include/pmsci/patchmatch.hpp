#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pmsci/matrix.hpp"

namespace pmsci {

// Dense nearest-neighbor field over same-image patches. Anchors are every
// top-left corner of a fully-inside patch; the offset at an anchor points
// to the best-matching other patch and never violates the self-match
// exclusion (Chebyshev norm >= min_offset).
struct NNField {
    int anchor_rows = 0, anchor_cols = 0;
    int patch = 0, min_offset = 0;
    std::vector<int> dr, dc;        // per-anchor displacement, row-major
    std::vector<double> costs;      // per-anchor SSD
    std::vector<double> sweep_mean_costs;  // [0] = after init, then one per sweep

    std::size_t index(int r, int c) const {
        return static_cast<std::size_t>(r) * anchor_cols + c;
    }
    double mean_cost() const;
};

struct PatchMatchParams {
    int patch = 8;
    int iterations = 5;
    int min_offset = 8;  // Chebyshev distance; one full patch keeps sources disjoint
    std::uint64_t seed = 0;
};

struct AttackReport {
    double psnr_db = 0.0;      // vs the identically trimmed gray original
    double mpr_percent = 0.0;
    int patch_size = 0;
    int iterations = 0;
    int min_offset = 0;
    std::uint64_t seed = 0;
};

// Randomized PatchMatch: random valid initialization, alternating-scan
// propagation, exponentially shrinking random search. Deterministic for a
// fixed seed.
NNField compute_nnf(const Image& img, const PatchMatchParams& params);

// The de-synchronization attack: every pixel is rebuilt as the uniform
// average of all matched patches overlapping it, a 3x3 binomial filter is
// applied, and the result is trimmed by patch-1 pixels per side. The report
// compares against the identically trimmed original.
std::pair<Image, AttackReport> anonymize(const Image& img,
                                         const PatchMatchParams& params = {});

}  // namespace pmsci

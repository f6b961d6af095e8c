#include "pmsci/patchmatch.hpp"

#include <algorithm>
#include <cmath>

#include "pmsci/imgops.hpp"
#include "pmsci/rng.hpp"

namespace pmsci {

double NNField::mean_cost() const {
    double s = 0.0;
    for (double c : costs) s += c;
    return s / static_cast<double>(costs.size());
}

namespace {

struct Grid {
    const Image& img;
    int patch;
    int rows, cols;  // anchor grid

    // SSD between the patches anchored at a and b; stops early once the
    // running sum exceeds `limit`.
    double cost(int ar, int ac, int br, int bc, double limit) const {
        double s = 0.0;
        for (int i = 0; i < patch; ++i) {
            for (int j = 0; j < patch; ++j) {
                const double d = img(ar + i, ac + j) - img(br + i, bc + j);
                s += d * d;
            }
            if (s > limit) return s;
        }
        return s;
    }

    bool inside(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
};

int chebyshev(int dr, int dc) { return std::max(std::abs(dr), std::abs(dc)); }

}  // namespace

NNField compute_nnf(const Image& img, const PatchMatchParams& params) {
    const int patch = params.patch;
    if (patch < 2) throw std::invalid_argument("compute_nnf: patch must be >= 2");
    if (img.rows() < 4 * patch || img.cols() < 4 * patch) {
        throw std::invalid_argument("compute_nnf: image must be at least 4 patches per side");
    }
    if (params.min_offset < 1) {
        throw std::invalid_argument("compute_nnf: min_offset must be >= 1");
    }

    NNField nnf;
    nnf.anchor_rows = img.rows() - patch + 1;
    nnf.anchor_cols = img.cols() - patch + 1;
    nnf.patch = patch;
    nnf.min_offset = params.min_offset;

    // Even the most central anchor must reach some target min_offset away.
    const int reach = std::max(nnf.anchor_rows / 2, nnf.anchor_cols / 2);
    if (params.min_offset > reach) {
        throw std::invalid_argument("compute_nnf: min_offset " +
                                    std::to_string(params.min_offset) +
                                    " leaves some anchors without a valid match");
    }

    const Grid grid{img, patch, nnf.anchor_rows, nnf.anchor_cols};
    const std::size_t n = static_cast<std::size_t>(nnf.anchor_rows) * nnf.anchor_cols;
    nnf.dr.resize(n);
    nnf.dc.resize(n);
    nnf.costs.resize(n);

    Rng rng(params.seed);

    // Random valid initialization, keeping the best of a few draws.
    for (int r = 0; r < nnf.anchor_rows; ++r) {
        for (int c = 0; c < nnf.anchor_cols; ++c) {
            const std::size_t idx = nnf.index(r, c);
            nnf.costs[idx] = 1e300;
            int draws = 0;
            for (int attempt = 0; attempt < 64 && draws < 8; ++attempt) {
                const int tr =
                    static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(grid.rows)));
                const int tc =
                    static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(grid.cols)));
                if (chebyshev(tr - r, tc - c) < params.min_offset) continue;
                ++draws;
                const double cost = grid.cost(r, c, tr, tc, nnf.costs[idx]);
                if (cost < nnf.costs[idx]) {
                    nnf.costs[idx] = cost;
                    nnf.dr[idx] = tr - r;
                    nnf.dc[idx] = tc - c;
                }
            }
            if (draws == 0) {
                // Farthest corner is always valid once the reach check passed.
                const int tr = r < grid.rows / 2 ? grid.rows - 1 : 0;
                const int tc = c < grid.cols / 2 ? grid.cols - 1 : 0;
                nnf.dr[idx] = tr - r;
                nnf.dc[idx] = tc - c;
                nnf.costs[idx] = grid.cost(r, c, tr, tc, 1e300);
            }
        }
    }
    nnf.sweep_mean_costs.push_back(nnf.mean_cost());

    auto try_target = [&](int r, int c, int tr, int tc) {
        if (!grid.inside(tr, tc)) return;
        if (chebyshev(tr - r, tc - c) < params.min_offset) return;
        const std::size_t idx = nnf.index(r, c);
        if (tr - r == nnf.dr[idx] && tc - c == nnf.dc[idx]) return;
        const double cost = grid.cost(r, c, tr, tc, nnf.costs[idx]);
        if (cost < nnf.costs[idx]) {
            nnf.costs[idx] = cost;
            nnf.dr[idx] = tr - r;
            nnf.dc[idx] = tc - c;
        }
    };

    const int search_start = std::max(grid.rows, grid.cols);
    for (int sweep = 0; sweep < params.iterations; ++sweep) {
        const bool forward = sweep % 2 == 0;
        const int step = forward ? 1 : -1;
        const int r0 = forward ? 0 : nnf.anchor_rows - 1;
        const int c0 = forward ? 0 : nnf.anchor_cols - 1;

        for (int r = r0; r >= 0 && r < nnf.anchor_rows; r += step) {
            for (int c = c0; c >= 0 && c < nnf.anchor_cols; c += step) {
                // Propagate offsets from already-visited neighbors: the
                // adjacent row/column/diagonal plus jump-flood distances,
                // which carry good offsets across basins within few sweeps.
                for (int jump : {1, 4, 16}) {
                    const int nr = r - step * jump, nc = c - step * jump;
                    if (nr >= 0 && nr < nnf.anchor_rows) {
                        const std::size_t ni = nnf.index(nr, c);
                        try_target(r, c, r + nnf.dr[ni], c + nnf.dc[ni]);
                    }
                    if (nc >= 0 && nc < nnf.anchor_cols) {
                        const std::size_t ni = nnf.index(r, nc);
                        try_target(r, c, r + nnf.dr[ni], c + nnf.dc[ni]);
                    }
                }
                {
                    const int nr = r - step, nc = c - step;
                    if (nr >= 0 && nr < nnf.anchor_rows && nc >= 0 && nc < nnf.anchor_cols) {
                        const std::size_t ni = nnf.index(nr, nc);
                        try_target(r, c, r + nnf.dr[ni], c + nnf.dc[ni]);
                    }
                }

                // Shrinking random search around the current best target.
                const std::size_t idx = nnf.index(r, c);
                for (int w = search_start; w >= 1; w /= 2) {
                    for (int attempt = 0; attempt < 6; ++attempt) {
                        const int br = r + nnf.dr[idx], bc = c + nnf.dc[idx];
                        const int tr =
                            br + static_cast<int>(rng.uniform_range(-w, w));
                        const int tc =
                            bc + static_cast<int>(rng.uniform_range(-w, w));
                        try_target(r, c, tr, tc);
                    }
                }
                // Local polish of the best target.
                for (auto [pr, pc] : {std::pair{-1, 0}, std::pair{1, 0}, std::pair{0, -1},
                                      std::pair{0, 1}}) {
                    try_target(r, c, r + nnf.dr[idx] + pr, c + nnf.dc[idx] + pc);
                }
            }
        }
        nnf.sweep_mean_costs.push_back(nnf.mean_cost());
    }
    return nnf;
}

std::pair<Image, AttackReport> anonymize(const Image& img, const PatchMatchParams& params) {
    NNField nnf = compute_nnf(img, params);
    const int patch = params.patch;

    // Uniform voting of every matched patch overlapping each pixel.
    Matrix votes(img.rows(), img.cols(), 0.0);
    Matrix weight(img.rows(), img.cols(), 0.0);
    for (int r = 0; r < nnf.anchor_rows; ++r) {
        for (int c = 0; c < nnf.anchor_cols; ++c) {
            const std::size_t idx = nnf.index(r, c);
            const int tr = r + nnf.dr[idx], tc = c + nnf.dc[idx];
            for (int i = 0; i < patch; ++i) {
                for (int j = 0; j < patch; ++j) {
                    votes(r + i, c + j) += img(tr + i, tc + j);
                    weight(r + i, c + j) += 1.0;
                }
            }
        }
    }
    for (std::size_t i = 0; i < votes.size(); ++i) votes.values()[i] /= weight.values()[i];

    Image filtered = binomial3_filter(votes);
    Image pm = trim_border(filtered, patch - 1);
    Image original = trim_border(img, patch - 1);

    AttackReport report;
    report.psnr_db = psnr(original, pm);
    report.mpr_percent = mpr(original, pm);
    report.patch_size = patch;
    report.iterations = params.iterations;
    report.min_offset = params.min_offset;
    report.seed = params.seed;
    return {std::move(pm), report};
}

}  // namespace pmsci

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmsci/denoise.hpp"
#include "pmsci/matrix.hpp"

namespace pmsci {

inline constexpr std::uint32_t kFingerprintFlagZeroMean = 1u;  // bit0

struct FingerprintMeta {
    std::uint32_t n = 0;          // source-image count
    double sigma0 = 0.0;          // residue extraction parameter
    std::uint32_t flags = 0;      // kFingerprintFlag* bits
    std::string label;            // free-form
    std::int64_t created_unix = 0;        // not persisted (file format has no field)
    std::uint64_t zero_denominator_cells = 0;  // not persisted; all-black pixel sites
};

// MLE-aggregated PRNU estimate.
struct Fingerprint {
    Matrix data;
    FingerprintMeta meta;
};

// Per-image terms of the MLE estimator: num = W.*L, den = L.*L. Summing
// these over any image list and finalizing reproduces the estimate for that
// list, which is what lets subset runs reuse cached residues.
struct FingerprintTerms {
    Matrix num, den;
};

FingerprintTerms fingerprint_terms(const Image& img, double sigma0 = kDefaultSigma0);

// Accumulates per-image terms. The per-cell sums are kept in 113-bit
// floats, which makes them exact for any realistic magnitude range, so the
// estimate is bit-identical under reordering of the images.
class FingerprintAccumulator {
public:
    explicit FingerprintAccumulator(double sigma0 = kDefaultSigma0) : sigma0_(sigma0) {}

    void add(const FingerprintTerms& terms);
    std::uint32_t count() const { return n_; }

    // Elementwise num/den with zero-denominator cells forced to 0, then
    // zero-mean of every row followed by every column.
    Fingerprint finalize(std::string label = "") const;

private:
    double sigma0_ = kDefaultSigma0;
    std::uint32_t n_ = 0;
    int rows_ = 0, cols_ = 0;
    std::vector<__float128> num_, den_;
};

// Subtracts each row mean, then each column mean, in place. Idempotent.
void zero_mean_rows_cols(Matrix& m);

struct EstimateOptions {
    double sigma0 = kDefaultSigma0;
    int trim = 0;        // border trim applied by generate_fingerprint before estimation
    int threads = 0;     // 0 = default
    std::string label;
};

// MLE estimate over in-memory images (all same dimensions, at least one).
Fingerprint estimate_fingerprint(const std::vector<Image>& images,
                                 const EstimateOptions& opts = {});

// Loads each path (gray conversion in the reader), trims if configured and
// runs estimate_fingerprint; IO errors name the offending path.
Fingerprint generate_fingerprint(const std::vector<std::string>& paths,
                                 const EstimateOptions& opts = {});

// Fingerprint file, bit-exact layout:
//   magic "PRNUFP01" | u32 rows | u32 cols | u32 n | f64 sigma0 |
//   u32 flags | u32 label length | label bytes | rows*cols f64 row-major
// All integers and doubles little-endian.
void save_fingerprint(const Fingerprint& fp, const std::string& path);
Fingerprint load_fingerprint(const std::string& path);

}  // namespace pmsci

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pmsci/fingerprint.hpp"
#include "pmsci/matrix.hpp"
#include "pmsci/pce.hpp"

namespace pmsci {

// Evidence for one case: PM images from the query camera (alpha) and, in
// the mixed scenario, PM plus pristine images from the unknown camera
// (beta). Ids are usually file paths; the loader maps them to pixels.
struct EvidenceSet {
    int case_id = 0;
    std::vector<std::string> alpha_ids;
    std::vector<std::string> beta_ids;

    std::vector<std::string> all_ids() const;
};

// One randomized subset and the PCE of its fingerprint against the query.
struct SubsetRecord {
    int k = 0;  // 1-based
    std::vector<std::string> members;
    double rho = 0.0;
};

// Union of all subsets whose PCE met the threshold, plus the PCE of the
// fused fingerprint.
struct FusionSet {
    int case_id = 0;
    std::vector<std::string> members;  // sorted
    double varrho = 0.0;
};

// Exact ratio behind every reported percentage.
struct RatioPct {
    long long num = 0;
    long long den = 0;
    double pct() const { return den == 0 ? 0.0 : 100.0 * num / static_cast<double>(den); }
};

struct CaseMetrics {
    std::optional<RatioPct> recall;     // |Phi| / |S_alpha|
    std::optional<RatioPct> precision;  // |Phi ∩ S_alpha| / |Phi|
};

// Cross-case summary over the cases that produced a fusion set.
struct AggregateMetrics {
    std::vector<int> cases_with_fusion;
    std::optional<RatioPct> total_recall;     // sum |Phi ∩ S_alpha| / sum |S_alpha|
    std::optional<RatioPct> total_precision;  // sum |Phi ∩ S_alpha| / sum |Phi|
    std::optional<RatioPct> selection;        // sum |Phi| / sum |S_Sigma|
};

struct SubsetSample {
    std::vector<std::vector<int>> subsets;  // ascending index lists, pairwise distinct
    bool truncated = false;  // fewer than K distinct subsets exist (or sampling exhausted)
};

// K distinct n-subsets of {0..set_size-1}, uniform via rejection sampling
// on duplicates; all C(set_size, n) subsets in lexicographic order when
// fewer than K exist. Deterministic per seed.
SubsetSample sample_subsets(int set_size, int n, int K, std::uint64_t seed);

using ImageLoader = std::function<Image(const std::string& id)>;

// Loader reading ids as file paths, with optional border trim.
ImageLoader file_loader(int trim = 0);

// Residue terms for every evidence id, computed once and shared by all
// subset evaluations (and across n / K sweeps).
class EvidenceCache {
public:
    EvidenceCache(std::vector<std::string> ids, const ImageLoader& loader, double sigma0,
                  int threads, const Matrix* expected_shape);

    const std::vector<std::string>& ids() const { return ids_; }
    const FingerprintTerms& terms(int idx) const { return terms_[static_cast<std::size_t>(idx)]; }
    double sigma0() const { return sigma0_; }

    // Estimate over the ids at `indices`, accumulated in the given order;
    // bit-identical to generate_fingerprint over the same id list.
    Fingerprint fuse(const std::vector<int>& indices) const;

private:
    std::vector<std::string> ids_;
    std::vector<FingerprintTerms> terms_;
    double sigma0_ = kDefaultSigma0;
};

struct CaseParams {
    int n = 5;
    int K = 100;
    double tau = kDefaultTau;
    std::uint64_t seed = 0;
    double sigma0 = kDefaultSigma0;
    int threads = 0;
};

struct CaseResult {
    int n = 0;
    std::vector<SubsetRecord> subsets;
    std::optional<FusionSet> fusion;
    bool truncated_sampling = false;
};

// Algorithm core: sample K subsets, fingerprint each, threshold at tau,
// union the hits into the fusion set and score its fused fingerprint.
CaseResult run_case(const EvidenceSet& ev, const Fingerprint& query, const CaseParams& params,
                    const EvidenceCache& cache);

// Convenience overload that builds the cache from a loader.
CaseResult run_case(const EvidenceSet& ev, const Fingerprint& query, const CaseParams& params,
                    const ImageLoader& loader);

CaseMetrics case_metrics(const EvidenceSet& ev, const std::optional<FusionSet>& fusion);

// Inputs are (evidence, fusion) pairs for one n value across cases.
AggregateMetrics aggregate_metrics(
    const std::vector<std::pair<const EvidenceSet*, const std::optional<FusionSet>*>>& cases);

// Intersection of fusion sets across n values for one case; absent unless
// at least two fusion sets are present.
std::optional<std::vector<std::string>> intersect_fusion_sets(
    const std::vector<const FusionSet*>& sets);

struct SweepRow {
    int K = 0;
    int n = 0;
    std::optional<FusionSet> fusion;
    CaseMetrics metrics;
};

// Re-evaluates the case on prefixes of the already sampled subset list;
// `full` must come from a run with K >= max(Ks).
std::vector<SweepRow> sweep_k(const EvidenceSet& ev, const Fingerprint& query,
                              const CaseParams& params, const std::vector<int>& Ks,
                              const CaseResult& full, const EvidenceCache& cache);

}  // namespace pmsci

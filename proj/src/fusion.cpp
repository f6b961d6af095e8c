#include "pmsci/fusion.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pmsci/image_io.hpp"
#include "pmsci/imgops.hpp"
#include "pmsci/parallel.hpp"
#include "pmsci/rng.hpp"

namespace pmsci {

std::vector<std::string> EvidenceSet::all_ids() const {
    std::vector<std::string> ids = alpha_ids;
    ids.insert(ids.end(), beta_ids.begin(), beta_ids.end());
    std::set<std::string> unique(ids.begin(), ids.end());
    if (unique.size() != ids.size()) {
        throw std::invalid_argument("EvidenceSet: duplicate image ids across S");
    }
    return ids;
}

namespace {

// C(n, k) saturated far above any realistic K.
long long binomial_capped(int n, int k, long long cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > cap) return cap;
    }
    return result;
}

void enumerate_subsets(int set_size, int n, std::vector<std::vector<int>>& out) {
    std::vector<int> current(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) current[static_cast<std::size_t>(i)] = i;
    for (;;) {
        out.push_back(current);
        int i = n - 1;
        while (i >= 0 && current[static_cast<std::size_t>(i)] == set_size - n + i) --i;
        if (i < 0) break;
        ++current[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

constexpr long long kRejectionCap = 1'000'000;

}  // namespace

SubsetSample sample_subsets(int set_size, int n, int K, std::uint64_t seed) {
    if (n <= 0 || K <= 0) throw std::invalid_argument("sample_subsets: n and K must be positive");
    if (n > set_size) {
        throw std::invalid_argument("sample_subsets: subset size " + std::to_string(n) +
                                    " exceeds set size " + std::to_string(set_size));
    }

    SubsetSample sample;
    const long long total = binomial_capped(set_size, n, 4LL * K);
    if (total <= K) {
        enumerate_subsets(set_size, n, sample.subsets);
        sample.truncated = total < K;
        return sample;
    }

    Rng rng(seed);
    std::set<std::vector<int>> seen;
    std::vector<int> pool(static_cast<std::size_t>(set_size));
    for (int i = 0; i < set_size; ++i) pool[static_cast<std::size_t>(i)] = i;

    long long rejections = 0;
    while (static_cast<int>(sample.subsets.size()) < K) {
        // Partial Fisher-Yates, then sort for the canonical form.
        for (int i = 0; i < n; ++i) {
            const int j = i + static_cast<int>(rng.uniform_int(
                                  static_cast<std::uint64_t>(set_size - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        std::vector<int> subset(pool.begin(), pool.begin() + n);
        std::sort(subset.begin(), subset.end());
        if (seen.insert(subset).second) {
            sample.subsets.push_back(std::move(subset));
        } else if (++rejections >= kRejectionCap) {
            sample.truncated = true;  // sampling exhausted
            break;
        }
    }
    return sample;
}

ImageLoader file_loader(int trim) {
    return [trim](const std::string& id) {
        Image img = load_image(id);
        return trim > 0 ? trim_border(img, trim) : img;
    };
}

EvidenceCache::EvidenceCache(std::vector<std::string> ids, const ImageLoader& loader,
                             double sigma0, int threads, const Matrix* expected_shape)
    : ids_(std::move(ids)), terms_(ids_.size()), sigma0_(sigma0) {
    parallel_for(static_cast<int>(ids_.size()), threads, [&](int i) {
        const std::string& id = ids_[static_cast<std::size_t>(i)];
        Image img;
        try {
            img = loader(id);
        } catch (const std::exception& e) {
            throw std::runtime_error("evidence '" + id + "': " + e.what());
        }
        if (expected_shape != nullptr && !img.same_shape(*expected_shape)) {
            throw std::runtime_error(
                "evidence '" + id + "' is " + std::to_string(img.rows()) + "x" +
                std::to_string(img.cols()) + " but the query fingerprint is " +
                std::to_string(expected_shape->rows()) + "x" +
                std::to_string(expected_shape->cols()));
        }
        terms_[static_cast<std::size_t>(i)] = fingerprint_terms(img, sigma0_);
    });
}

Fingerprint EvidenceCache::fuse(const std::vector<int>& indices) const {
    FingerprintAccumulator acc(sigma0_);
    for (int idx : indices) acc.add(terms(idx));
    return acc.finalize();
}

CaseResult run_case(const EvidenceSet& ev, const Fingerprint& query, const CaseParams& params,
                    const EvidenceCache& cache) {
    CaseResult result;
    result.n = params.n;

    const std::vector<std::string>& ids = cache.ids();
    SubsetSample sample =
        sample_subsets(static_cast<int>(ids.size()), params.n, params.K, params.seed);
    result.truncated_sampling = sample.truncated;
    result.subsets.resize(sample.subsets.size());

    parallel_for(static_cast<int>(sample.subsets.size()), params.threads, [&](int k) {
        const std::vector<int>& subset = sample.subsets[static_cast<std::size_t>(k)];
        Fingerprint fk = cache.fuse(subset);
        SubsetRecord& rec = result.subsets[static_cast<std::size_t>(k)];
        rec.k = k + 1;
        rec.members.reserve(subset.size());
        for (int idx : subset) rec.members.push_back(ids[static_cast<std::size_t>(idx)]);
        rec.rho = pce_match(fk.data, query).pce;
    });

    std::set<int> fused_indices;
    for (std::size_t k = 0; k < sample.subsets.size(); ++k) {
        if (result.subsets[k].rho >= params.tau) {
            fused_indices.insert(sample.subsets[k].begin(), sample.subsets[k].end());
        }
    }
    if (!fused_indices.empty()) {
        FusionSet fusion;
        fusion.case_id = ev.case_id;
        std::vector<int> indices(fused_indices.begin(), fused_indices.end());
        for (int idx : indices) fusion.members.push_back(ids[static_cast<std::size_t>(idx)]);
        fusion.varrho = pce_match(cache.fuse(indices).data, query).pce;
        result.fusion = std::move(fusion);
    }
    return result;
}

CaseResult run_case(const EvidenceSet& ev, const Fingerprint& query, const CaseParams& params,
                    const ImageLoader& loader) {
    EvidenceCache cache(ev.all_ids(), loader, params.sigma0, params.threads, &query.data);
    return run_case(ev, query, params, cache);
}

CaseMetrics case_metrics(const EvidenceSet& ev, const std::optional<FusionSet>& fusion) {
    CaseMetrics metrics;
    if (!fusion.has_value() || fusion->members.empty()) return metrics;

    const std::set<std::string> alpha(ev.alpha_ids.begin(), ev.alpha_ids.end());
    long long in_alpha = 0;
    for (const std::string& id : fusion->members) {
        if (alpha.count(id) != 0) ++in_alpha;
    }
    const auto phi = static_cast<long long>(fusion->members.size());
    if (!ev.alpha_ids.empty()) {
        metrics.recall = RatioPct{phi, static_cast<long long>(ev.alpha_ids.size())};
    }
    metrics.precision = RatioPct{in_alpha, phi};
    return metrics;
}

AggregateMetrics aggregate_metrics(
    const std::vector<std::pair<const EvidenceSet*, const std::optional<FusionSet>*>>& cases) {
    AggregateMetrics agg;
    long long phi_total = 0, alpha_total = 0, sigma_total = 0, hit_total = 0;
    for (const auto& [ev, fusion] : cases) {
        if (fusion == nullptr || !fusion->has_value() || (*fusion)->members.empty()) continue;
        agg.cases_with_fusion.push_back(ev->case_id);
        const std::set<std::string> alpha(ev->alpha_ids.begin(), ev->alpha_ids.end());
        for (const std::string& id : (*fusion)->members) {
            if (alpha.count(id) != 0) ++hit_total;
        }
        phi_total += static_cast<long long>((*fusion)->members.size());
        alpha_total += static_cast<long long>(ev->alpha_ids.size());
        sigma_total += static_cast<long long>(ev->alpha_ids.size() + ev->beta_ids.size());
    }
    if (agg.cases_with_fusion.empty()) return agg;
    agg.total_recall = RatioPct{hit_total, alpha_total};
    agg.total_precision = RatioPct{hit_total, phi_total};
    agg.selection = RatioPct{phi_total, sigma_total};
    return agg;
}

std::optional<std::vector<std::string>> intersect_fusion_sets(
    const std::vector<const FusionSet*>& sets) {
    std::vector<const FusionSet*> present;
    for (const FusionSet* s : sets) {
        if (s != nullptr && !s->members.empty()) present.push_back(s);
    }
    if (present.size() < 2) return std::nullopt;

    std::set<std::string> common(present.front()->members.begin(),
                                 present.front()->members.end());
    for (std::size_t i = 1; i < present.size(); ++i) {
        std::set<std::string> next;
        for (const std::string& id : present[i]->members) {
            if (common.count(id) != 0) next.insert(id);
        }
        common = std::move(next);
    }
    return std::vector<std::string>(common.begin(), common.end());
}

std::vector<SweepRow> sweep_k(const EvidenceSet& ev, const Fingerprint& query,
                              const CaseParams& params, const std::vector<int>& Ks,
                              const CaseResult& full, const EvidenceCache& cache) {
    std::map<std::string, int> id_index;
    for (std::size_t i = 0; i < cache.ids().size(); ++i) {
        id_index[cache.ids()[i]] = static_cast<int>(i);
    }

    std::vector<SweepRow> rows;
    for (int K : Ks) {
        SweepRow row;
        row.K = K;
        row.n = full.n;
        std::set<int> fused;
        for (const SubsetRecord& rec : full.subsets) {
            if (rec.k > K) break;
            if (rec.rho < params.tau) continue;
            for (const std::string& id : rec.members) fused.insert(id_index.at(id));
        }
        if (!fused.empty()) {
            FusionSet fusion;
            fusion.case_id = ev.case_id;
            std::vector<int> indices(fused.begin(), fused.end());
            for (int idx : indices) fusion.members.push_back(cache.ids()[static_cast<std::size_t>(idx)]);
            fusion.varrho = pce_match(cache.fuse(indices).data, query).pce;
            row.fusion = std::move(fusion);
        }
        row.metrics = case_metrics(ev, row.fusion);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace pmsci

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "pmsci/fusion.hpp"
#include "pmsci/patchmatch.hpp"

namespace pmsci {

inline constexpr const char* kReportSchema = "pm-sci/1";

// Machine-readable run configuration embedded in every report.
struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::string output_dir;
    double sigma0 = kDefaultSigma0;
    int trim = 0;
    int patch = 8;
    int iterations = 5;
    int min_offset = 8;
    std::vector<int> n_values;
    int K = 100;
    double tau = kDefaultTau;
    std::uint64_t seed = 0;
    int threads = 0;
};

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const AttackReport& report);
nlohmann::json to_json(const SubsetRecord& record);
nlohmann::json to_json(const FusionSet& fusion);
nlohmann::json to_json(const CaseMetrics& metrics);
nlohmann::json to_json(const CaseResult& result, const CaseMetrics& metrics);

// Full case report: config, evidence manifest, per-subset records, fusion
// membership and metrics per n, optional K sweep, n-intersection.
nlohmann::json case_report_json(const RunConfig& config, const EvidenceSet& ev,
                                const std::vector<CaseResult>& runs,
                                const std::vector<std::vector<SweepRow>>& sweeps);

// Table-style flattening, one row per n (plus sweep rows when present):
// case_id,n,K,median_pce,max_pce,fusion_size,fusion_pce,recall_pct,precision_pct
std::string case_report_csv(const EvidenceSet& ev, const std::vector<CaseResult>& runs,
                            const std::vector<std::vector<SweepRow>>& sweeps);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace pmsci

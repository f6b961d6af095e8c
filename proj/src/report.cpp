#include "pmsci/report.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace pmsci {

using nlohmann::json;

namespace {

json ratio_json(const std::optional<RatioPct>& ratio) {
    if (!ratio.has_value()) return nullptr;
    return json{{"num", ratio->num}, {"den", ratio->den}, {"pct", ratio->pct()}};
}

double median_rho(const CaseResult& result) {
    std::vector<double> values;
    values.reserve(result.subsets.size());
    for (const SubsetRecord& rec : result.subsets) values.push_back(rec.rho);
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    if (m == 0) return 0.0;
    return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

double max_rho(const CaseResult& result) {
    double best = 0.0;
    bool first = true;
    for (const SubsetRecord& rec : result.subsets) {
        if (first || rec.rho > best) best = rec.rho;
        first = false;
    }
    return best;
}

}  // namespace

json to_json(const RunConfig& config) {
    return json{{"command", config.command},
                {"inputs", config.inputs},
                {"output_dir", config.output_dir},
                {"sigma0", config.sigma0},
                {"trim", config.trim},
                {"patch", config.patch},
                {"iterations", config.iterations},
                {"min_offset", config.min_offset},
                {"n_values", config.n_values},
                {"K", config.K},
                {"tau", config.tau},
                {"seed", config.seed},
                {"threads", config.threads}};
}

json to_json(const AttackReport& report) {
    return json{{"psnr_db", report.psnr_db},
                {"mpr_percent", report.mpr_percent},
                {"patch_size", report.patch_size},
                {"iterations", report.iterations},
                {"min_offset", report.min_offset},
                {"seed", report.seed}};
}

json to_json(const SubsetRecord& record) {
    return json{{"k", record.k}, {"members", record.members}, {"rho", record.rho}};
}

json to_json(const FusionSet& fusion) {
    return json{{"case_id", fusion.case_id},
                {"members", fusion.members},
                {"size", fusion.members.size()},
                {"varrho", fusion.varrho}};
}

json to_json(const CaseMetrics& metrics) {
    return json{{"recall", ratio_json(metrics.recall)},
                {"precision", ratio_json(metrics.precision)}};
}

json to_json(const CaseResult& result, const CaseMetrics& metrics) {
    json subsets = json::array();
    for (const SubsetRecord& rec : result.subsets) subsets.push_back(to_json(rec));
    return json{{"n", result.n},
                {"median_pce", median_rho(result)},
                {"max_pce", max_rho(result)},
                {"truncated_sampling", result.truncated_sampling},
                {"subsets", subsets},
                {"fusion", result.fusion.has_value() ? to_json(*result.fusion) : json(nullptr)},
                {"metrics", to_json(metrics)}};
}

json case_report_json(const RunConfig& config, const EvidenceSet& ev,
                      const std::vector<CaseResult>& runs,
                      const std::vector<std::vector<SweepRow>>& sweeps) {
    json report;
    report["schema"] = kReportSchema;
    report["created_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
    report["config"] = to_json(config);
    report["evidence"] = json{{"case_id", ev.case_id},
                              {"alpha", ev.alpha_ids},
                              {"beta", ev.beta_ids}};

    json runs_json = json::array();
    for (const CaseResult& run : runs) {
        runs_json.push_back(to_json(run, case_metrics(ev, run.fusion)));
    }
    report["runs"] = runs_json;

    json sweeps_json = json::array();
    for (const std::vector<SweepRow>& rows : sweeps) {
        for (const SweepRow& row : rows) {
            sweeps_json.push_back(
                json{{"K", row.K},
                     {"n", row.n},
                     {"fusion", row.fusion.has_value() ? to_json(*row.fusion) : json(nullptr)},
                     {"metrics", to_json(row.metrics)}});
        }
    }
    report["sweep"] = sweeps_json;

    // Intersection refinement across the n values that produced a fusion set.
    std::vector<const FusionSet*> sets;
    for (const CaseResult& run : runs) {
        if (run.fusion.has_value()) sets.push_back(&*run.fusion);
    }
    auto intersection = intersect_fusion_sets(sets);
    if (intersection.has_value()) {
        FusionSet combined;
        combined.case_id = ev.case_id;
        combined.members = *intersection;
        CaseMetrics metrics = case_metrics(ev, std::optional<FusionSet>(combined));
        report["intersection"] = json{{"members", *intersection},
                                      {"size", intersection->size()},
                                      {"metrics", to_json(metrics)}};
    } else {
        report["intersection"] = nullptr;
    }
    return report;
}

std::string case_report_csv(const EvidenceSet& ev, const std::vector<CaseResult>& runs,
                            const std::vector<std::vector<SweepRow>>& sweeps) {
    std::ostringstream out;
    out << "case_id,n,K,median_pce,max_pce,fusion_size,fusion_pce,recall_pct,precision_pct\n";
    auto emit = [&](int n, int K, const std::string& med, const std::string& max,
                    const std::optional<FusionSet>& fusion, const CaseMetrics& metrics) {
        out << ev.case_id << "," << n << "," << K << ",";
        out << med << "," << max << ",";
        if (fusion.has_value()) {
            out << fusion->members.size() << "," << fusion->varrho << ",";
        } else {
            out << "--,--,";  // the tables' no-outcome marker
        }
        if (metrics.recall.has_value()) out << metrics.recall->pct();
        else out << "--";
        out << ",";
        if (metrics.precision.has_value()) out << metrics.precision->pct();
        else out << "--";
        out << "\n";
    };
    auto num = [](double v) {
        std::ostringstream s;
        s << v;
        return s.str();
    };

    for (const CaseResult& run : runs) {
        emit(run.n, static_cast<int>(run.subsets.size()), num(median_rho(run)),
             num(max_rho(run)), run.fusion, case_metrics(ev, run.fusion));
    }
    for (const std::vector<SweepRow>& rows : sweeps) {
        for (const SweepRow& row : rows) {
            emit(row.n, row.K, "--", "--", row.fusion, row.metrics);
        }
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace pmsci

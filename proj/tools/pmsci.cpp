#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pmsci/fusion.hpp"
#include "pmsci/image_io.hpp"
#include "pmsci/imgops.hpp"
#include "pmsci/parallel.hpp"
#include "pmsci/patchmatch.hpp"
#include "pmsci/pce.hpp"
#include "pmsci/report.hpp"
#include "pmsci/rng.hpp"
#include "pmsci/simcam.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> list_images(const std::string& dir_or_file) {
    std::vector<std::string> files;
    fs::path p(dir_or_file);
    if (fs::is_directory(p)) {
        for (const auto& entry : fs::directory_iterator(p)) {
            if (!entry.is_regular_file()) continue;
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char ch) { return std::tolower(ch); });
            if (ext == ".png" || ext == ".pgm") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
    } else if (fs::is_regular_file(p)) {
        files.push_back(dir_or_file);
    } else {
        throw std::runtime_error("no such file or directory: '" + dir_or_file + "'");
    }
    if (files.empty()) throw std::runtime_error("no images found under '" + dir_or_file + "'");
    return files;
}

void dump_residue_raw(const pmsci::NoiseResidue& residue, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "'");
    out.write(reinterpret_cast<const char*>(residue.data()),
              static_cast<std::streamsize>(residue.size() * sizeof(double)));
}

struct CommonOpts {
    double sigma0 = pmsci::kDefaultSigma0;
    int trim = 0;
    int threads = 0;
};

int cmd_fingerprint(const std::vector<std::string>& images, const std::string& out,
                    const std::string& label, const CommonOpts& common) {
    pmsci::EstimateOptions opts;
    opts.sigma0 = common.sigma0;
    opts.trim = common.trim;
    opts.threads = common.threads;
    opts.label = label;
    pmsci::Fingerprint fp = pmsci::generate_fingerprint(images, opts);
    pmsci::save_fingerprint(fp, out);
    std::cout << "fingerprint " << fp.data.rows() << "x" << fp.data.cols()
              << " from n=" << fp.meta.n << " images, sigma0=" << fp.meta.sigma0
              << ", label='" << fp.meta.label << "' -> " << out << "\n";
    return 0;
}

int cmd_pce(const std::vector<std::string>& images, const std::string& fp_path, bool set_mode,
            double tau, const pmsci::PceOptions& pce_opts, const std::string& dump_residue,
            const CommonOpts& common) {
    pmsci::Fingerprint fq = pmsci::load_fingerprint(fp_path);
    pmsci::EstimateOptions opts;
    opts.sigma0 = common.sigma0;
    opts.trim = common.trim;
    opts.threads = common.threads;

    json out;
    if (set_mode) {
        pmsci::PceResult res = pmsci::pce_of_set(images, fq, opts, pce_opts);
        out = json{{"mode", "set"},
                   {"inputs", images},
                   {"pce", res.pce},
                   {"peak", {res.peak_row, res.peak_col}},
                   {"peak_corr", res.peak_corr},
                   {"energy", res.energy},
                   {"above_tau", res.pce >= tau}};
    } else {
        out = json::array();
        for (const std::string& path : images) {
            pmsci::Image img = pmsci::load_image(path);
            if (common.trim > 0) img = pmsci::trim_border(img, common.trim);
            pmsci::NoiseResidue residue = pmsci::extract_residue(img, common.sigma0);
            if (!dump_residue.empty()) dump_residue_raw(residue, dump_residue);
            pmsci::PceResult res = pmsci::pce_match(residue, fq, &img, pce_opts);
            out.push_back(json{{"mode", "image"},
                               {"input", path},
                               {"pce", res.pce},
                               {"peak", {res.peak_row, res.peak_col}},
                               {"peak_corr", res.peak_corr},
                               {"energy", res.energy},
                               {"above_tau", res.pce >= tau}});
        }
        if (out.size() == 1) out = out[0];
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_anonymize(const std::vector<std::string>& images, const std::string& out_dir,
                  const pmsci::PatchMatchParams& params, const CommonOpts& common) {
    fs::create_directories(out_dir);
    std::vector<std::string> failures(images.size());
    pmsci::parallel_for(static_cast<int>(images.size()), common.threads, [&](int i) {
        const std::string& path = images[static_cast<std::size_t>(i)];
        pmsci::Image img = pmsci::load_image(path);

        pmsci::PatchMatchParams per_image = params;
        per_image.seed = pmsci::Rng::derive(params.seed, static_cast<std::uint64_t>(i));
        auto [pm, report] = pmsci::anonymize(img, per_image);
        pmsci::Image before = pmsci::trim_border(img, params.patch - 1);

        const std::string stem = fs::path(path).stem().string();
        const fs::path before_path = fs::path(out_dir) / ("out-pm-before-" + stem + ".png");
        const fs::path after_path = fs::path(out_dir) / ("out-pm-after-" + stem + ".png");
        const fs::path report_path = fs::path(out_dir) / ("out-pm-report-" + stem + ".json");
        pmsci::save_image(before, before_path.string());
        pmsci::save_image(pm, after_path.string());

        json jreport = pmsci::to_json(report);
        jreport["input"] = path;
        jreport["before"] = before_path.string();
        jreport["after"] = after_path.string();
        jreport["batch_seed"] = params.seed;
        pmsci::write_text_file(report_path.string(), jreport.dump(2) + "\n");
    });
    std::cout << "anonymized " << images.size() << " image(s) -> " << out_dir << "\n";
    return 0;
}

int cmd_attribute(const std::string& alpha_dir, const std::string& beta_dir,
                  const std::string& fp_path, std::vector<int> n_values, int K, double tau,
                  std::uint64_t seed, const std::vector<int>& sweep_ks, bool per_image,
                  bool prefilter, int case_id, const std::string& out_dir,
                  const CommonOpts& common) {
    pmsci::Fingerprint fq = pmsci::load_fingerprint(fp_path);

    pmsci::EvidenceSet ev;
    ev.case_id = case_id;
    ev.alpha_ids = list_images(alpha_dir);
    if (!beta_dir.empty()) ev.beta_ids = list_images(beta_dir);

    const pmsci::ImageLoader loader = pmsci::file_loader(common.trim);

    // Optional conventional per-image pass (the tables' n=1* reference).
    json per_image_json = json::array();
    std::vector<std::string> flagged;
    if (per_image || prefilter) {
        std::vector<std::string> ids = ev.all_ids();
        std::vector<double> pces(ids.size());
        pmsci::parallel_for(static_cast<int>(ids.size()), common.threads, [&](int i) {
            pmsci::Image img = loader(ids[static_cast<std::size_t>(i)]);
            pmsci::NoiseResidue residue = pmsci::extract_residue(img, common.sigma0);
            pces[static_cast<std::size_t>(i)] = pmsci::pce_match(residue, fq, &img).pce;
        });
        for (std::size_t i = 0; i < ids.size(); ++i) {
            per_image_json.push_back(json{{"id", ids[i]}, {"pce", pces[i]}});
            if (pces[i] >= tau) flagged.push_back(ids[i]);
        }
        if (prefilter && !flagged.empty()) {
            auto drop = [&](std::vector<std::string>& list) {
                std::erase_if(list, [&](const std::string& id) {
                    return std::find(flagged.begin(), flagged.end(), id) != flagged.end();
                });
            };
            drop(ev.alpha_ids);
            drop(ev.beta_ids);
        }
    }

    pmsci::EvidenceCache cache(ev.all_ids(), loader, common.sigma0, common.threads, &fq.data);

    std::vector<pmsci::CaseResult> runs;
    std::vector<std::vector<pmsci::SweepRow>> sweeps;
    for (int n : n_values) {
        pmsci::CaseParams params;
        params.n = n;
        params.K = K;
        params.tau = tau;
        params.seed = pmsci::Rng::derive(seed, static_cast<std::uint64_t>(n));
        params.sigma0 = common.sigma0;
        params.threads = common.threads;
        pmsci::CaseResult result = pmsci::run_case(ev, fq, params, cache);

        if (!sweep_ks.empty()) {
            sweeps.push_back(pmsci::sweep_k(ev, fq, params, sweep_ks, result, cache));
        }

        pmsci::CaseMetrics metrics = pmsci::case_metrics(ev, result.fusion);
        std::cout << "n=" << n << " subsets=" << result.subsets.size();
        if (result.fusion.has_value()) {
            std::cout << " |Phi|=" << result.fusion->members.size()
                      << " pce=" << result.fusion->varrho;
            if (metrics.recall.has_value()) std::cout << " recall=" << metrics.recall->pct() << "%";
            if (metrics.precision.has_value()) {
                std::cout << " precision=" << metrics.precision->pct() << "%";
            }
        } else {
            std::cout << " fusion=--";
        }
        std::cout << "\n";
        runs.push_back(std::move(result));
    }

    pmsci::RunConfig config;
    config.command = "attribute";
    config.inputs = {alpha_dir, beta_dir.empty() ? std::string("--") : beta_dir, fp_path};
    config.output_dir = out_dir;
    config.sigma0 = common.sigma0;
    config.trim = common.trim;
    config.n_values = n_values;
    config.K = K;
    config.tau = tau;
    config.seed = seed;
    config.threads = common.threads;

    json report = pmsci::case_report_json(config, ev, runs, sweeps);
    if (per_image || prefilter) {
        report["per_image"] = per_image_json;
        report["prefiltered"] = flagged;
    }

    fs::create_directories(out_dir);
    const fs::path json_path = fs::path(out_dir) / "report.json";
    const fs::path csv_path = fs::path(out_dir) / "report.csv";
    pmsci::write_text_file(json_path.string(), report.dump(2) + "\n");
    pmsci::write_text_file(csv_path.string(), pmsci::case_report_csv(ev, runs, sweeps));
    std::cout << "report -> " << json_path.string() << ", " << csv_path.string() << "\n";
    return 0;
}

int cmd_simulate(int cameras, int images, int fingerprint_count, int rows, int cols,
                 double strength, double noise_std, std::uint64_t seed,
                 const std::string& out_dir, const CommonOpts& common) {
    if (fingerprint_count <= 0 || fingerprint_count >= images) {
        throw std::runtime_error("simulate: fingerprint count must be in (0, images)");
    }
    for (int cam_idx = 0; cam_idx < cameras; ++cam_idx) {
        char name[32];
        std::snprintf(name, sizeof(name), "camera_%02d", cam_idx);
        const fs::path cam_dir = fs::path(out_dir) / name;
        const fs::path img_dir = cam_dir / "pristine";
        fs::create_directories(img_dir);

        const std::uint64_t cam_seed = pmsci::Rng::derive(seed, static_cast<std::uint64_t>(cam_idx));
        pmsci::SynthCamera cam = pmsci::make_camera(rows, cols, strength, noise_std, cam_seed);

        std::vector<std::string> files(static_cast<std::size_t>(images));
        pmsci::parallel_for(images, common.threads, [&](int i) {
            const std::uint64_t scene_seed =
                pmsci::Rng::derive(cam_seed, 1000 + static_cast<std::uint64_t>(i));
            const std::uint64_t shot_seed =
                pmsci::Rng::derive(cam_seed, 2000 + static_cast<std::uint64_t>(i));
            pmsci::Image scene = pmsci::synth_scene(rows, cols, scene_seed);
            pmsci::Image shot = pmsci::capture(cam, scene, shot_seed);
            char fname[32];
            std::snprintf(fname, sizeof(fname), "capture_%03d.png", i);
            const fs::path out_path = img_dir / fname;
            pmsci::save_image(shot, out_path.string());
            files[static_cast<std::size_t>(i)] = out_path.string();
        });

        // Random fingerprint-builder selection, remainder reserved for tests.
        std::vector<int> order(static_cast<std::size_t>(images));
        for (int i = 0; i < images; ++i) order[static_cast<std::size_t>(i)] = i;
        pmsci::Rng rng(pmsci::Rng::derive(cam_seed, 3000));
        for (int i = images - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        std::ostringstream fp_list, test_list;
        std::vector<int> fp_idx(order.begin(), order.begin() + fingerprint_count);
        std::vector<int> test_idx(order.begin() + fingerprint_count, order.end());
        std::sort(fp_idx.begin(), fp_idx.end());
        std::sort(test_idx.begin(), test_idx.end());
        for (int i : fp_idx) fp_list << files[static_cast<std::size_t>(i)] << "\n";
        for (int i : test_idx) test_list << files[static_cast<std::size_t>(i)] << "\n";
        pmsci::write_text_file((cam_dir / "fingerprint_list.txt").string(), fp_list.str());
        pmsci::write_text_file((cam_dir / "test_list.txt").string(), test_list.str());

        json cam_json{{"name", name},        {"rows", rows},
                      {"cols", cols},        {"prnu_strength", strength},
                      {"noise_std", noise_std}, {"seed", cam_seed},
                      {"images", images},    {"fingerprint_count", fingerprint_count}};
        pmsci::write_text_file((cam_dir / "camera.json").string(), cam_json.dump(2) + "\n");
        std::cout << name << ": " << images << " captures (" << fingerprint_count
                  << " fingerprint, " << images - fingerprint_count << " test) -> "
                  << cam_dir.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PRNU source camera attribution for Patch-Match anonymized image sets"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--threads", common.threads, "worker threads (0 = PMSCI_THREADS or hardware)")
        ->capture_default_str();

    // fingerprint
    auto* fp_cmd = app.add_subcommand("fingerprint", "estimate a PRNU fingerprint from images");
    std::vector<std::string> fp_images;
    std::string fp_out, fp_label;
    fp_cmd->add_option("images", fp_images, "input images (PNG/PGM)")->required();
    fp_cmd->add_option("--out", fp_out, "output fingerprint file")->required();
    fp_cmd->add_option("--label", fp_label, "free-form label stored in the file");
    fp_cmd->add_option("--sigma0", common.sigma0, "residue noise std, 8-bit units")
        ->capture_default_str();
    fp_cmd->add_option("--trim", common.trim, "trim border before estimation")
        ->capture_default_str();

    // pce
    auto* pce_cmd = app.add_subcommand("pce", "PCE of images or an image set vs a fingerprint");
    std::vector<std::string> pce_images;
    std::string pce_fp, pce_dump;
    bool pce_set = false;
    double pce_tau = pmsci::kDefaultTau;
    pmsci::PceOptions pce_opts;
    pce_cmd->add_option("images", pce_images, "input images")->required();
    pce_cmd->add_option("--fp", pce_fp, "reference fingerprint file")->required();
    pce_cmd->add_flag("--set", pce_set, "treat the images as one set (fingerprint-vs-fingerprint)");
    pce_cmd->add_option("--tau", pce_tau, "similarity threshold")->capture_default_str();
    pce_cmd->add_option("--exclusion", pce_opts.exclusion, "peak exclusion window side")
        ->capture_default_str();
    pce_cmd->add_flag("--peak-search", pce_opts.search_peak,
                      "search the whole surface for the peak instead of reading (0,0)");
    pce_cmd->add_option("--sigma0", common.sigma0)->capture_default_str();
    pce_cmd->add_option("--trim", common.trim)->capture_default_str();
    pce_cmd->add_option("--dump-residue", pce_dump, "raw f64 residue dump (debug)")
        ->group("");  // hidden

    // anonymize
    auto* anon_cmd = app.add_subcommand("anonymize", "apply the Patch-Match attack");
    std::vector<std::string> anon_images;
    std::string anon_out = ".";
    pmsci::PatchMatchParams pm_params;
    anon_cmd->add_option("images", anon_images, "input images")->required();
    anon_cmd->add_option("--out", anon_out, "output directory")->capture_default_str();
    anon_cmd->add_option("--patch", pm_params.patch, "patch size")->capture_default_str();
    anon_cmd->add_option("--iterations", pm_params.iterations, "PatchMatch sweeps")
        ->capture_default_str();
    anon_cmd->add_option("--min-offset", pm_params.min_offset, "self-match exclusion radius")
        ->capture_default_str();
    anon_cmd->add_option("--seed", pm_params.seed, "RNG seed")->capture_default_str();

    // attribute
    auto* attr_cmd = app.add_subcommand("attribute", "randomized subset + fusion attribution");
    std::string attr_alpha, attr_beta, attr_fp, attr_out = ".";
    std::vector<int> attr_n = {5, 10, 15, 20};
    std::vector<int> attr_sweep;
    int attr_K = 100, attr_case = 1;
    double attr_tau = pmsci::kDefaultTau;
    std::uint64_t attr_seed = 0;
    bool attr_per_image = false, attr_prefilter = false;
    attr_cmd->add_option("--alpha", attr_alpha, "directory (or file) of suspected PM images")
        ->required();
    attr_cmd->add_option("--beta", attr_beta, "directory of unknown-camera images (optional)");
    attr_cmd->add_option("--fp", attr_fp, "query camera fingerprint")->required();
    attr_cmd->add_option("--n", attr_n, "subset sizes")->delimiter(',')->capture_default_str();
    attr_cmd->add_option("--K", attr_K, "number of subsets")->capture_default_str();
    attr_cmd->add_option("--tau", attr_tau, "PCE threshold")->capture_default_str();
    attr_cmd->add_option("--seed", attr_seed, "RNG seed")->capture_default_str();
    attr_cmd->add_option("--sweep-k", attr_sweep, "re-evaluate on prefixes of the subsets")
        ->delimiter(',');
    attr_cmd->add_option("--case-id", attr_case, "case label for the report")
        ->capture_default_str();
    attr_cmd->add_flag("--per-image", attr_per_image, "also run the conventional per-image pass");
    attr_cmd->add_flag("--prefilter", attr_prefilter,
                       "drop individually identifiable images before subset analysis");
    attr_cmd->add_option("--out", attr_out, "report directory")->capture_default_str();
    attr_cmd->add_option("--sigma0", common.sigma0)->capture_default_str();
    attr_cmd->add_option("--trim", common.trim)->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "materialize a synthetic camera dataset");
    int sim_cameras = 2, sim_images = 55, sim_fp_count = 25, sim_rows = 256, sim_cols = 256;
    double sim_strength = 0.0035, sim_noise = 2.0;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    sim_cmd->add_option("--cameras", sim_cameras)->capture_default_str();
    sim_cmd->add_option("--images", sim_images, "captures per camera")->capture_default_str();
    sim_cmd->add_option("--fingerprint-count", sim_fp_count, "captures reserved for the fingerprint")
        ->capture_default_str();
    sim_cmd->add_option("--rows", sim_rows)->capture_default_str();
    sim_cmd->add_option("--cols", sim_cols)->capture_default_str();
    sim_cmd->add_option("--strength", sim_strength, "PRNU strength")->capture_default_str();
    sim_cmd->add_option("--noise-std", sim_noise, "shot/read noise std")->capture_default_str();
    sim_cmd->add_option("--seed", sim_seed)->capture_default_str();
    sim_cmd->add_option("--out", sim_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(fp_cmd)) {
            return cmd_fingerprint(fp_images, fp_out, fp_label, common);
        }
        if (app.got_subcommand(pce_cmd)) {
            return cmd_pce(pce_images, pce_fp, pce_set, pce_tau, pce_opts, pce_dump, common);
        }
        if (app.got_subcommand(anon_cmd)) {
            return cmd_anonymize(anon_images, anon_out, pm_params, common);
        }
        if (app.got_subcommand(attr_cmd)) {
            return cmd_attribute(attr_alpha, attr_beta, attr_fp, attr_n, attr_K, attr_tau,
                                 attr_seed, attr_sweep, attr_per_image, attr_prefilter,
                                 attr_case, attr_out, common);
        }
        if (app.got_subcommand(sim_cmd)) {
            return cmd_simulate(sim_cameras, sim_images, sim_fp_count, sim_rows, sim_cols,
                                sim_strength, sim_noise, sim_seed, sim_out, common);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

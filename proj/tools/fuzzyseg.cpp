// fuzzyseg: fuzzy-clustering image segmentation front end.
// Subcommands: segment, evaluate, phantom, benchmark.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fuzzyseg/clustering.hpp"
#include "fuzzyseg/imageio.hpp"
#include "fuzzyseg/metrics.hpp"
#include "fuzzyseg/mfcm.hpp"
#include "fuzzyseg/parallel.hpp"
#include "fuzzyseg/phantom.hpp"

namespace fs = std::filesystem;
using namespace fuzzyseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArguments = 2;
constexpr int kExitSolverError = 3;
constexpr int kExitIoError = 4;

std::string format_value(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9g", v);
    return buffer;
}

/// All tunables with their defaults; flags are named after these fields.
struct RunConfig {
    std::string algorithm = "fcm";
    std::size_t clusters = 2;
    double fuzzifier = 2.0;
    double eta_exp = 2.0;
    double epsilon = 1e-5;
    std::size_t max_iter = 100;
    std::uint64_t seed = 1;
    std::string norm = "euclidean";
    std::string eta_mode = "fixed";
    double k_scale = 1.0;
    double lambda = 0.5;
    int r_l = 2;
    int r_s = 5;
    int r_p = 2;
    double h = 0.1;
    std::string input;
    std::string output;
    std::string membership_csv;
    bool verbose = false;
};

void add_solver_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--clusters,--c", cfg.clusters, "Cluster count c (>= 2)")
        ->capture_default_str();
    cmd->add_option("--fuzzifier,--m", cfg.fuzzifier, "Fuzzifier m (> 1)")
        ->capture_default_str();
    cmd->add_option("--eta-exp", cfg.eta_exp, "FPCM typicality exponent (> 1)")
        ->capture_default_str();
    cmd->add_option("--epsilon", cfg.epsilon, "Convergence threshold on max |dU|")
        ->capture_default_str();
    cmd->add_option("--max-iter", cfg.max_iter, "Iteration cap")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "RNG seed for the initial partition")
        ->capture_default_str();
    cmd->add_option("--norm", cfg.norm, "Distance norm")
        ->check(CLI::IsMember({"euclidean", "mahalanobis"}))
        ->capture_default_str();
    cmd->add_option("--eta-mode", cfg.eta_mode, "PCM eta policy")
        ->check(CLI::IsMember({"fixed", "per-iteration"}))
        ->capture_default_str();
    cmd->add_option("--K,--k-scale", cfg.k_scale, "PCM eta scale factor K (> 0)")
        ->capture_default_str();
    cmd->add_option("--lambda", cfg.lambda,
                    "MFCM tradeoff between local and non-local terms, in [0,1]")
        ->capture_default_str();
    cmd->add_option("--r-l", cfg.r_l, "MFCM neighborhood radius r_l")
        ->capture_default_str();
    cmd->add_option("--r-s", cfg.r_s, "MFCM non-local search radius r_s")
        ->capture_default_str();
    cmd->add_option("--r-p", cfg.r_p, "MFCM patch radius r_p")
        ->capture_default_str();
    cmd->add_option("--h", cfg.h, "MFCM non-local filtering bandwidth h (> 0)")
        ->capture_default_str();
}

SolverParams solver_params(const RunConfig& cfg) {
    SolverParams p;
    p.c = cfg.clusters;
    p.m = cfg.fuzzifier;
    p.epsilon = cfg.epsilon;
    p.max_iter = cfg.max_iter;
    p.seed = cfg.seed;
    p.norm = cfg.norm == "mahalanobis" ? Norm::Mahalanobis : Norm::Euclidean;
    return p;
}

NonLocalConfig nonlocal_config(const RunConfig& cfg) {
    NonLocalConfig nl;
    nl.neighborhood_radius = cfg.r_l;
    nl.search_radius = cfg.r_s;
    nl.patch_radius = cfg.r_p;
    nl.bandwidth = cfg.h;
    nl.lambda = cfg.lambda;
    return nl;
}

IterationObserver verbose_observer(bool verbose) {
    if (!verbose) return {};
    return [](const IterationState& state) {
        std::cout << "iter=" << state.iteration
                  << " delta=" << format_value(state.max_delta)
                  << " objective=" << format_value(state.objective) << "\n";
    };
}

struct SegmentOutput {
    std::vector<std::size_t> labels;
    Matrix membership;
    std::size_t iterations = 0;
    bool converged = false;
    double objective = 0.0;
};

SegmentOutput run_algorithm(const std::string& algo, const GrayImage& image,
                            const RunConfig& cfg, unsigned threads,
                            const IterationObserver& observer) {
    SegmentOutput out;
    const SolverParams base = solver_params(cfg);
    if (algo == "mfcm") {
        MfcmParams params{base, nonlocal_config(cfg)};
        SegmentationResult r = run_mfcm(image, params, observer, threads);
        out.labels = std::move(r.labels);
        out.membership = std::move(r.membership.values);
        out.iterations = r.iterations;
        out.converged = r.converged;
        out.objective = r.objective_trace.back();
        return out;
    }
    const Dataset data = to_dataset(image);
    if (algo == "fcm") {
        SegmentationResult r = run_fcm(data, base, observer);
        out.labels = std::move(r.labels);
        out.membership = std::move(r.membership.values);
        out.iterations = r.iterations;
        out.converged = r.converged;
        out.objective = r.objective_trace.back();
    } else if (algo == "fpcm") {
        FpcmParams params{base, cfg.eta_exp};
        SegmentationResult r = run_fpcm(data, params, observer);
        out.labels = std::move(r.labels);
        out.membership = std::move(r.membership.values);
        out.iterations = r.iterations;
        out.converged = r.converged;
        out.objective = r.objective_trace.back();
    } else if (algo == "pcm") {
        PcmParams params{base,
                         cfg.eta_mode == "per-iteration" ? PcmEtaMode::PerIteration
                                                         : PcmEtaMode::FixedFromInit,
                         cfg.k_scale};
        PcmResult r = run_pcm(data, params, observer);
        out.labels = argmax_labels(r.membership);
        out.membership = std::move(r.membership);
        out.iterations = r.iterations;
        out.converged = r.converged;
        out.objective = r.objective_trace.back();
    } else {
        throw InvalidParameters("unknown algorithm '" + algo + "'");
    }
    return out;
}

int cmd_segment(const RunConfig& cfg) {
    const GrayImage image = read_gray(cfg.input);
    const unsigned threads = threads_from_env();
    const SegmentOutput out = run_algorithm(cfg.algorithm, image, cfg, threads,
                                            verbose_observer(cfg.verbose));

    std::vector<std::uint8_t> bytes(out.labels.size());
    for (std::size_t k = 0; k < out.labels.size(); ++k) {
        bytes[k] = std::uint8_t(out.labels[k]);
    }
    write_labels(LabelImage(image.width, image.height, cfg.clusters,
                            std::move(bytes)),
                 cfg.output);
    if (!cfg.membership_csv.empty()) {
        write_membership_csv(out.membership, cfg.membership_csv);
    }

    std::cout << "algorithm=" << cfg.algorithm << "\n"
              << "iterations=" << out.iterations << "\n"
              << "converged=" << (out.converged ? "true" : "false") << "\n"
              << "objective=" << format_value(out.objective) << "\n";
    return kExitOk;
}

void append_csv_row(const fs::path& path, const std::string& row) {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    if (fresh) out << kEvalCsvHeader << "\n";
    out << row << "\n";
    if (!out) throw IoError("short write to " + path.string());
}

int cmd_evaluate(const std::string& seg_path, const std::string& gt_path,
                 const std::string& csv_path, const std::string& algo,
                 SimilarityIndex index) {
    const BinaryMask seg = read_mask(seg_path);
    const BinaryMask gt = read_mask(gt_path);
    const EvalReport report = evaluate(seg, gt, index);
    std::cout << to_key_value(report);
    if (!csv_path.empty()) {
        append_csv_row(csv_path, to_csv_row(report, algo));
    }
    return kExitOk;
}

struct PhantomFlags {
    std::string spec_path;
    std::string out_image;
    std::string out_mask;
    PhantomSpec inline_spec;
    std::vector<std::vector<double>> disks;
    std::vector<std::vector<double>> rects;
    std::string noise = "none";
};

PhantomSpec build_phantom_spec(const PhantomFlags& flags, const CLI::App* cmd) {
    PhantomSpec spec;
    if (!flags.spec_path.empty()) {
        spec = load_phantom_spec(flags.spec_path);
    }
    // Explicit inline flags override the file.
    auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--width")) spec.width = flags.inline_spec.width;
    if (given("--height")) spec.height = flags.inline_spec.height;
    if (given("--background-intensity")) {
        spec.background_intensity = flags.inline_spec.background_intensity;
    }
    if (given("--object-intensity")) {
        spec.object_intensity = flags.inline_spec.object_intensity;
    }
    if (given("--seed")) spec.seed = flags.inline_spec.seed;
    if (given("--sigma")) spec.noise.sigma = flags.inline_spec.noise.sigma;
    if (given("--prob")) spec.noise.prob = flags.inline_spec.noise.prob;
    if (given("--noise")) {
        if (flags.noise == "none") {
            spec.noise.kind = NoiseKind::None;
        } else if (flags.noise == "gaussian") {
            spec.noise.kind = NoiseKind::Gaussian;
        } else {
            spec.noise.kind = NoiseKind::SaltPepper;
        }
    }
    if (!flags.disks.empty()) {
        spec.disks.clear();
        for (const auto& d : flags.disks) {
            if (d.size() != 3) throw InvalidParameters("--disk expects cx,cy,r");
            spec.disks.push_back({d[0], d[1], d[2]});
        }
    }
    if (!flags.rects.empty()) {
        spec.rects.clear();
        for (const auto& r : flags.rects) {
            if (r.size() != 4) throw InvalidParameters("--rect expects x,y,w,h");
            spec.rects.push_back({r[0], r[1], r[2], r[3]});
        }
    }
    spec.validate();
    return spec;
}

int cmd_phantom(const PhantomFlags& flags, const CLI::App* cmd) {
    const PhantomSpec spec = build_phantom_spec(flags, cmd);
    const Phantom phantom = generate(spec);
    write_gray(phantom.image, flags.out_image);
    write_mask(phantom.mask, flags.out_mask);
    std::cout << "width=" << spec.width << "\n"
              << "height=" << spec.height << "\n"
              << "object_pixels=" << phantom.mask.object_count() << "\n";
    return kExitOk;
}

int cmd_benchmark(const std::string& spec_path,
                  const std::vector<std::string>& algorithms,
                  const std::vector<std::uint64_t>& seeds,
                  const std::string& csv_path, RunConfig cfg,
                  SimilarityIndex index) {
    if (algorithms.empty()) throw InvalidParameters("no algorithms requested");
    if (seeds.empty()) throw InvalidParameters("no seeds requested");
    for (const std::string& algo : algorithms) {
        if (algo != "fcm" && algo != "mfcm" && algo != "pcm" && algo != "fpcm") {
            throw InvalidParameters("unknown algorithm '" + algo + "'");
        }
    }
    const PhantomSpec base_spec = load_phantom_spec(spec_path);
    const unsigned threads = threads_from_env();

    // One phantom per seed, shared across algorithms.
    std::vector<Phantom> phantoms;
    phantoms.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        PhantomSpec spec = base_spec;
        spec.seed = seed;
        phantoms.push_back(generate(spec));
    }

    // Cells are independent; run them in parallel and merge in fixed order.
    const std::size_t cells = algorithms.size() * seeds.size();
    std::vector<EvalReport> reports(cells);
    std::vector<std::string> errors(cells);
    parallel_for(cells, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t cell = begin; cell < end; ++cell) {
            const std::size_t a = cell / seeds.size();
            const std::size_t s = cell % seeds.size();
            RunConfig cell_cfg = cfg;
            cell_cfg.seed = seeds[s];
            const Phantom& phantom = phantoms[s];
            try {
                const SegmentOutput out = run_algorithm(
                    algorithms[a], phantom.image, cell_cfg, 0, {});
                const auto object_clusters =
                    match_clusters(out.labels, phantom.mask, cell_cfg.clusters);
                const BinaryMask seg =
                    labels_to_mask(out.labels, phantom.image.width,
                                   phantom.image.height, object_clusters);
                reports[cell] = evaluate(seg, phantom.mask, index);
            } catch (const Error& e) {
                errors[cell] = e.what();
            }
        }
    });
    for (std::size_t cell = 0; cell < cells; ++cell) {
        if (!errors[cell].empty()) {
            throw SolverError("benchmark cell " + algorithms[cell / seeds.size()] +
                              "/seed=" + std::to_string(seeds[cell % seeds.size()]) +
                              " failed: " + errors[cell]);
        }
    }

    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw IoError("cannot open " + csv_path + " for writing");
    csv << kEvalCsvHeader << "\n";
    std::string summary;
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        double sim = 0.0, fpr = 0.0, fnr = 0.0;
        double tp = 0.0, fp = 0.0, fn = 0.0, tn = 0.0;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const EvalReport& r = reports[a * seeds.size() + s];
            csv << to_csv_row(r, algorithms[a]) << "\n";
            sim += r.similarity;
            fpr += r.false_positive_ratio;
            fnr += r.false_negative_ratio;
            tp += double(r.tp);
            fp += double(r.fp);
            fn += double(r.fn);
            tn += double(r.tn);
        }
        const double count = double(seeds.size());
        csv << algorithms[a] << "-mean," << format_value(sim / count) << ","
            << format_value(fpr / count) << "," << format_value(fnr / count) << ","
            << format_value(tp / count) << "," << format_value(fp / count) << ","
            << format_value(fn / count) << "," << format_value(tn / count) << "\n";
        summary += "mean_similarity_" + algorithms[a] + "=" +
                   format_value(sim / count) + "\n";
        summary += "mean_fpr_" + algorithms[a] + "=" + format_value(fpr / count) +
                   "\n";
        summary += "mean_fnr_" + algorithms[a] + "=" + format_value(fnr / count) +
                   "\n";
    }
    if (!csv) throw IoError("short write to " + csv_path);
    csv.close();
    std::cout << summary;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuzzy-clustering image segmentation toolkit"};
    app.require_subcommand(1);
    // --h is the non-local bandwidth flag, so help is long-form only.
    app.set_help_flag("--help", "Print help");

    RunConfig cfg;

    // segment
    CLI::App* segment = app.add_subcommand("segment", "Cluster an image into c labels");
    segment->set_help_flag("--help", "Print help");
    segment->add_option("--algo,--algorithm", cfg.algorithm, "Algorithm")
        ->check(CLI::IsMember({"fcm", "mfcm", "pcm", "fpcm"}))
        ->capture_default_str();
    segment->add_option("--input", cfg.input, "Input PGM/PNG image")->required();
    segment->add_option("--output", cfg.output, "Output label PGM")->required();
    segment->add_option("--membership", cfg.membership_csv,
                        "Also write the membership matrix as CSV");
    segment->add_flag("--verbose", cfg.verbose, "Log one line per iteration");
    add_solver_flags(segment, cfg);

    // evaluate
    std::string seg_path, gt_path, csv_path, algo_label = "seg", index_name = "dice";
    CLI::App* eval = app.add_subcommand("evaluate",
                                        "Compare a segmentation mask to ground truth");
    eval->set_help_flag("--help", "Print help");
    eval->add_option("--seg", seg_path, "Segmentation mask (PGM)")->required();
    eval->add_option("--gt", gt_path, "Ground-truth mask (PGM)")->required();
    eval->add_option("--csv", csv_path, "Append one CSV row to this file");
    eval->add_option("--algo", algo_label, "Algorithm label for the CSV row")
        ->capture_default_str();
    eval->add_option("--index", index_name, "Similarity index")
        ->check(CLI::IsMember({"dice", "jaccard"}))
        ->capture_default_str();

    // phantom
    PhantomFlags ph;
    CLI::App* phantom = app.add_subcommand("phantom",
                                           "Generate a ground-truthed synthetic image");
    phantom->set_help_flag("--help", "Print help");
    phantom->add_option("--spec", ph.spec_path,
                        "key=value spec file (keys: width, height, "
                        "background_intensity, object_intensity, disk=cx,cy,r, "
                        "rect=x,y,w,h, noise=none|gaussian|salt_pepper, sigma, "
                        "prob, seed)");
    phantom->add_option("--out-image", ph.out_image, "Output image path")->required();
    phantom->add_option("--out-mask", ph.out_mask, "Output mask PGM")->required();
    phantom->add_option("--width", ph.inline_spec.width, "Image width");
    phantom->add_option("--height", ph.inline_spec.height, "Image height");
    phantom->add_option("--background-intensity",
                        ph.inline_spec.background_intensity, "Background level");
    phantom->add_option("--object-intensity", ph.inline_spec.object_intensity,
                        "Object level");
    phantom->add_option("--disk", ph.disks, "Disk as cx,cy,r (repeatable)")
        ->delimiter(',');
    phantom->add_option("--rect", ph.rects, "Rectangle as x,y,w,h (repeatable)")
        ->delimiter(',');
    phantom->add_option("--noise", ph.noise, "Noise kind")
        ->check(CLI::IsMember({"none", "gaussian", "salt_pepper"}));
    phantom->add_option("--sigma", ph.inline_spec.noise.sigma, "Gaussian std-dev");
    phantom->add_option("--prob", ph.inline_spec.noise.prob,
                        "Salt-pepper flip probability");
    phantom->add_option("--seed", ph.inline_spec.seed, "Noise RNG seed");

    // benchmark
    std::string bench_spec, bench_csv;
    std::vector<std::string> bench_algos = {"fcm", "mfcm", "pcm", "fpcm"};
    std::vector<std::uint64_t> bench_seeds = {1};
    std::string bench_index = "dice";
    CLI::App* bench = app.add_subcommand(
        "benchmark", "Phantom benchmark: segment + evaluate per (algorithm, seed)");
    bench->set_help_flag("--help", "Print help");
    bench->add_option("--spec", bench_spec, "Phantom spec file")->required();
    bench->add_option("--csv", bench_csv, "Output CSV")->required();
    bench->add_option("--algos", bench_algos, "Algorithms to compare")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--seeds", bench_seeds, "Seeds (phantom noise and solver init)")
        ->delimiter(',')
        ->capture_default_str();
    bench->add_option("--index", bench_index, "Similarity index")
        ->check(CLI::IsMember({"dice", "jaccard"}))
        ->capture_default_str();
    add_solver_flags(bench, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArguments;
    }

    try {
        if (segment->parsed()) return cmd_segment(cfg);
        if (eval->parsed()) {
            const SimilarityIndex index = index_name == "jaccard"
                                              ? SimilarityIndex::Jaccard
                                              : SimilarityIndex::Dice;
            return cmd_evaluate(seg_path, gt_path, csv_path, algo_label, index);
        }
        if (phantom->parsed()) return cmd_phantom(ph, phantom);
        if (bench->parsed()) {
            const SimilarityIndex index = bench_index == "jaccard"
                                              ? SimilarityIndex::Jaccard
                                              : SimilarityIndex::Dice;
            return cmd_benchmark(bench_spec, bench_algos, bench_seeds, bench_csv,
                                 cfg, index);
        }
    } catch (const InvalidParameters& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArguments;
    } catch (const InvalidReference& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadArguments;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverError;
    }
    return kExitBadArguments;
}

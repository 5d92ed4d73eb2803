#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msihar/detail/json.hpp"
#include "msihar/errors.hpp"
#include "msihar/experiment.hpp"
#include "msihar/flow.hpp"
#include "msihar/flow_io.hpp"
#include "msihar/csv_io.hpp"
#include "msihar/manifest.hpp"
#include "msihar/msi.hpp"
#include "msihar/pipeline.hpp"
#include "msihar/resample.hpp"
#include "msihar/synth.hpp"
#include "msihar/version.hpp"

namespace fs = std::filesystem;
using msihar::Error;
using ordered_json = nlohmann::ordered_json;

namespace {

void emit_error(const std::string& type, const std::string& message) {
    ordered_json doc;
    doc["error"]["type"] = type;
    doc["error"]["message"] = message;
    std::cerr << doc.dump() << "\n";
}

// Errors carry their type as a "TypeName: " prefix on what().
void emit_error(const Error& e) {
    std::string what = e.what();
    auto sep = what.find(": ");
    if (sep == std::string::npos) {
        emit_error("Error", what);
    } else {
        emit_error(what.substr(0, sep), what.substr(sep + 2));
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw msihar::DataLoadFailed("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw msihar::DataLoadFailed("short write to '" + path.string() + "'");
}

std::string dump_report(const ordered_json& doc) { return doc.dump(2) + "\n"; }

struct MsiOpts {
    std::string manifest;
    std::string out;
    std::string cmsi_out;
    msihar::WindowSpec window;
    msihar::MsiParams params;
};

int run_msi(const MsiOpts& opt) {
    auto manifest = msihar::DatasetManifest::load(opt.manifest);
    auto windows = msihar::video_msi_windows(manifest, opt.window, opt.params);
    std::ostringstream csv;
    msihar::write_msi_csv(csv, windows);
    write_text_file(opt.out, csv.str());
    ordered_json summary;
    summary["out"] = opt.out;
    summary["n_windows"] = windows.size();
    if (!opt.cmsi_out.empty()) {
        auto cmsi = msihar::class_cmsi_from_windows(windows);
        ordered_json doc;
        doc["version"] = msihar::kVersion;
        for (const auto& [cls, value] : cmsi)
            doc["class_cmsi"][std::to_string(cls)] = value;
        write_text_file(opt.cmsi_out, dump_report(doc));
        summary["cmsi_out"] = opt.cmsi_out;
    }
    std::cout << summary.dump() << "\n";
    return 0;
}

struct CalibrateOpts {
    std::string manifest;
    std::string out_dir;
    double rate_hz = 25.0;
};

// Per-class moment matching: virtual streams are rescaled against the real
// train streams whose majority label matches theirs, falling back to the
// pooled real train statistics for classes with no real coverage.
int run_calibrate(const CalibrateOpts& opt) {
    auto manifest = msihar::DatasetManifest::load(opt.manifest);
    std::vector<msihar::ImuSeries> real_train;
    std::vector<std::pair<msihar::ImuSeries, fs::path>> virt;
    for (const auto& entry : manifest.imu()) {
        auto series = msihar::resample_linear(
            msihar::load_imu_csv(entry.path, entry.provenance), opt.rate_hz);
        if (entry.provenance == msihar::Provenance::Virtual) {
            virt.emplace_back(std::move(series), entry.path);
        } else if (entry.split == "train") {
            real_train.push_back(std::move(series));
        }
    }
    if (real_train.empty())
        throw msihar::EmptyReference("manifest has no real train streams");
    if (virt.empty())
        throw msihar::DataLoadFailed("manifest has no virtual streams to calibrate");

    auto reference = msihar::pooled_axis_stats(real_train);
    std::vector<msihar::ImuSeries> virt_series;
    for (const auto& [series, src_path] : virt) virt_series.push_back(series);
    auto source = msihar::pooled_axis_stats(virt_series);

    ordered_json doc;
    doc["version"] = msihar::kVersion;
    doc["rate_hz"] = opt.rate_hz;
    doc["source"]["mean"] = source.mean;
    doc["source"]["stddev"] = source.stddev;
    doc["reference"]["mean"] = reference.mean;
    doc["reference"]["stddev"] = reference.stddev;

    fs::create_directories(opt.out_dir);
    for (const auto& [series, src_path] : virt) {
        auto calibrated = msihar::calibrate_virtual(series, source, reference);
        fs::path out_path = fs::path(opt.out_dir) / src_path.filename();
        msihar::write_imu_csv(calibrated, out_path);
        ordered_json row;
        row["source"] = src_path.string();
        row["out"] = out_path.string();
        doc["outputs"].push_back(row);
    }
    fs::path stats_path = fs::path(opt.out_dir) / "calibration.json";
    write_text_file(stats_path, dump_report(doc));
    std::cout << ordered_json{{"stats", stats_path.string()},
                              {"n_calibrated", virt.size()}}
                     .dump()
              << "\n";
    return 0;
}

struct EvalOpts {
    std::string config;
    bool augmented = false;
};

int run_eval_cmd(const EvalOpts& opt) {
    auto config = msihar::ExperimentConfig::from_json_file(opt.config);
    config.validate();
    auto data = msihar::load_experiment_data(config, /*with_msi=*/false);
    auto result = msihar::run_eval(config, data, opt.augmented);
    auto report = msihar::eval_report_json(config, result);
    const std::string variant = opt.augmented ? "augmented" : "baseline";
    fs::path report_path = config.output_dir / ("report_" + variant + ".json");
    write_text_file(report_path, dump_report(report));
    for (std::size_t i = 0; i < result.predictions.size(); ++i) {
        std::ostringstream csv;
        msihar::write_prediction_csv(csv, result.predictions[i]);
        write_text_file(config.output_dir /
                            ("predictions_" + variant + "_seed" +
                             std::to_string(result.runs[i].seed) + ".csv"),
                        csv.str());
    }
    ordered_json summary;
    summary["report"] = report_path.string();
    summary["task"] = result.task;
    summary["augmented"] = result.augmented;
    summary["macro_f1"] = result.mean_f1;
    if (result.mean_f1_moments) summary["moment_f1"] = *result.mean_f1_moments;
    std::cout << summary.dump() << "\n";
    return 0;
}

struct MomentOpts {
    std::string pred;
    std::string out;
    msihar::MomentParams params;
    int positive_class = 1;
};

int run_moments(const MomentOpts& opt) {
    std::ifstream in(opt.pred);
    if (!in) throw msihar::DataLoadFailed("cannot open '" + opt.pred + "'");
    auto rows = msihar::read_prediction_csv(in);
    auto moments = msihar::aggregate_moments(rows, opt.params, opt.positive_class);
    std::ostringstream csv;
    msihar::write_moment_csv(csv, moments);
    write_text_file(opt.out, csv.str());
    std::cout << ordered_json{{"out", opt.out}, {"n_moments", moments.size()}}.dump()
              << "\n";
    return 0;
}

int run_sweep_cmd(const std::string& config_path) {
    auto config = msihar::ExperimentConfig::from_json_file(config_path);
    config.validate();
    auto data = msihar::load_experiment_data(config, /*with_msi=*/true);
    auto result = msihar::run_sweep(config, data);
    auto report = msihar::sweep_result_json(config, result);
    fs::path report_path = config.output_dir / "sweep.json";
    write_text_file(report_path, dump_report(report));

    std::ostringstream points_csv;
    msihar::write_sweep_points_csv(points_csv, result.aggregate.points);
    write_text_file(config.output_dir / "sweep_points.csv", points_csv.str());
    std::ostringstream spline_csv;
    msihar::write_spline_samples_csv(spline_csv, result.aggregate.spline.spline);
    write_text_file(config.output_dir / "sweep_spline.csv", spline_csv.str());

    ordered_json summary;
    summary["report"] = report_path.string();
    summary["pearson_r"] = result.aggregate.correlation.r;
    summary["pearson_p"] = result.aggregate.correlation.p;
    if (result.aggregate.zero_crossing)
        summary["zero_crossing"] = *result.aggregate.zero_crossing;
    else
        summary["zero_crossing"] = nullptr;
    std::cout << summary.dump() << "\n";
    return 0;
}

struct SynthOpts {
    std::string out_dir;
    msihar::SynthParams params;
};

int run_synth(const SynthOpts& opt) {
    auto summary = msihar::generate_fixture(opt.params, opt.out_dir);
    ordered_json doc;
    doc["manifest"] = summary.manifest_path.string();
    doc["class_amplitude_px"] = summary.class_amplitude_px;
    doc["class_freq_hz"] = summary.class_freq_hz;
    std::cout << doc.dump() << "\n";
    return 0;
}

struct FlowOpts {
    std::string frames_dir;
    std::string out;
    double fps = 10.0;
    msihar::HornSchunckParams params;
};

int run_flow(const FlowOpts& opt) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(opt.frames_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    if (paths.size() < 2)
        throw msihar::DataLoadFailed("need at least two .pgm frames in '" +
                                     opt.frames_dir + "'");
    std::vector<msihar::GrayFrame> frames;
    frames.reserve(paths.size());
    for (const auto& p : paths) frames.push_back(msihar::load_gray_pgm(p));
    std::vector<msihar::FlowField> fields;
    fields.reserve(frames.size() - 1);
    for (std::size_t i = 0; i + 1 < frames.size(); ++i)
        fields.push_back(msihar::horn_schunck(frames[i], frames[i + 1], opt.params));
    msihar::FlowSequence seq(std::move(fields), opt.fps,
                             fs::path(opt.frames_dir).filename().string());
    msihar::write_flow_sequence(seq, opt.out);
    std::cout << ordered_json{{"out", opt.out}, {"n_fields", seq.frames().size()}}.dump()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion subtlety index and wearable activity recognition toolkit"};
    app.set_version_flag("--version", std::string(msihar::kVersion));
    app.require_subcommand(1);

    MsiOpts msi_opts;
    auto* msi = app.add_subcommand("msi", "Per-window MSI over the manifest videos");
    msi->add_option("--manifest", msi_opts.manifest, "dataset manifest JSON")->required();
    msi->add_option("--out", msi_opts.out, "output MSI CSV")->required();
    msi->add_option("--cmsi-out", msi_opts.cmsi_out, "also write per-class KDE-mode MSI JSON");
    msi->add_option("--window-seconds", msi_opts.window.length_s, "window length in seconds");
    msi->add_option("--step-seconds", msi_opts.window.step_s, "window step in seconds");
    msi->add_option("--patch-fraction", msi_opts.params.patch_fraction, "patch size as fraction of max(H, W)");
    msi->add_option("--msi-w", msi_opts.params.w, "exponential weight w");
    msi->add_option("--min-valid-fraction", msi_opts.params.min_valid_fraction, "minimum usable frame fraction per window");
    msi->add_option("--min-confidence", msi_opts.params.min_confidence, "minimum keypoint confidence");

    CalibrateOpts cal_opts;
    auto* cal = app.add_subcommand("calibrate", "Rescale virtual IMU streams onto real train statistics");
    cal->add_option("--manifest", cal_opts.manifest, "dataset manifest JSON")->required();
    cal->add_option("--out-dir", cal_opts.out_dir, "directory for calibrated CSVs")->required();
    cal->add_option("--rate", cal_opts.rate_hz, "resample rate in Hz");

    EvalOpts eval_opts;
    auto* eval = app.add_subcommand("eval", "Train and evaluate a forest per the experiment config");
    eval->add_option("--config", eval_opts.config, "experiment config JSON")->required();
    auto* aug_flag = eval->add_flag("--augmented", eval_opts.augmented, "train on real + calibrated virtual data");
    eval->add_flag("--baseline{false}", eval_opts.augmented, "train on real data only (default)")
        ->excludes(aug_flag);

    MomentOpts mom_opts;
    auto* mom = app.add_subcommand("moments", "Cluster positive window predictions into moments");
    mom->add_option("--pred", mom_opts.pred, "prediction CSV")->required();
    mom->add_option("--out", mom_opts.out, "output moment CSV")->required();
    mom->add_option("--eps", mom_opts.params.eps_s, "DBSCAN epsilon in seconds");
    mom->add_option("--min-pts", mom_opts.params.min_pts, "DBSCAN min points");
    mom->add_option("--positive-class", mom_opts.positive_class, "positive class id");

    std::string sweep_config;
    auto* sweep = app.add_subcommand("sweep", "MSI cut-off sweep with line, correlation and spline fits");
    sweep->add_option("--config", sweep_config, "experiment config JSON")->required();

    SynthOpts synth_opts;
    auto* synth = app.add_subcommand("synth", "Generate the synthetic flow + IMU fixture");
    synth->add_option("--out", synth_opts.out_dir, "fixture output directory")->required();
    synth->add_option("--seed", synth_opts.params.seed, "master seed");
    synth->add_option("--classes", synth_opts.params.n_classes, "number of activity classes");
    synth->add_option("--videos-per-class", synth_opts.params.videos_per_class, "videos per class");
    synth->add_option("--video-seconds", synth_opts.params.video_seconds, "video duration in seconds");
    synth->add_option("--video-fps", synth_opts.params.video_fps, "video frame rate");
    synth->add_option("--real-seconds", synth_opts.params.real_seconds, "real IMU stream duration");
    synth->add_option("--real-rate", synth_opts.params.real_rate_hz, "real IMU sample rate");
    synth->add_option("--tracker-noise", synth_opts.params.tracker_noise_px, "keypoint tracker drift std in pixels");
    synth->add_option("--sensor-noise", synth_opts.params.sensor_noise, "real sensor noise in m/s^2");
    synth->add_option("--baseline-wander", synth_opts.params.baseline_wander, "real baseline wander std in m/s^2");

    FlowOpts flow_opts;
    auto* flow = app.add_subcommand("flow", "Estimate dense flow from a directory of PGM frames");
    flow->add_option("--frames", flow_opts.frames_dir, "directory of .pgm frames, sorted by name")->required();
    flow->add_option("--out", flow_opts.out, "output flow file")->required();
    flow->add_option("--fps", flow_opts.fps, "frame rate to record");
    flow->add_option("--alpha", flow_opts.params.alpha, "smoothness weight");
    flow->add_option("--iterations", flow_opts.params.iterations, "maximum Jacobi sweeps");
    flow->add_option("--eps", flow_opts.params.convergence_eps, "early-stop mean update threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        emit_error("ConfigInvalid", e.what());
        return 2;
    }

    try {
        if (app.got_subcommand(msi)) return run_msi(msi_opts);
        if (app.got_subcommand(cal)) return run_calibrate(cal_opts);
        if (app.got_subcommand(eval)) return run_eval_cmd(eval_opts);
        if (app.got_subcommand(mom)) return run_moments(mom_opts);
        if (app.got_subcommand(sweep)) return run_sweep_cmd(sweep_config);
        if (app.got_subcommand(synth)) return run_synth(synth_opts);
        if (app.got_subcommand(flow)) return run_flow(flow_opts);
    } catch (const msihar::ConfigInvalid& e) {
        emit_error(e);
        return 2;
    } catch (const Error& e) {
        emit_error(e);
        return 3;
    } catch (const std::exception& e) {
        emit_error("Error", e.what());
        return 3;
    }
    return 0;
}

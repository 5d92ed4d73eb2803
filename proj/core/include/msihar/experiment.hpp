#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msihar/detail/json.hpp"

#include "msihar/analysis.hpp"
#include "msihar/dbscan.hpp"
#include "msihar/forest.hpp"
#include "msihar/manifest.hpp"
#include "msihar/msi.hpp"
#include "msihar/pipeline.hpp"

namespace msihar {

struct ExperimentConfig {
    std::filesystem::path manifest_path;
    std::string task = "daily";  // daily (stratified CV) | eating (hold-out)
    WindowSpec window;
    FeatureSet features = FeatureSet::Ecdf;
    int ecdf_points = 15;
    ForestParams forest;
    MomentParams moments;
    MsiParams msi;
    SweepMode sweep_mode = SweepMode::VirtualOnly;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::uint64_t fold_seed = 42;
    int folds = 5;
    int positive_class = 1;
    int spline_knots = 5;
    std::filesystem::path output_dir = "out";

    // Relative paths in the document resolve against base_dir.
    static ExperimentConfig from_json(const nlohmann::ordered_json& doc,
                                      const std::filesystem::path& base_dir);
    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;
    void validate() const;
};

// Per-window MSI over every manifest video, sliding the window spec along
// each video's timeline. Windows without enough usable keypoints are
// dropped.
std::vector<MsiWindow> video_msi_windows(const DatasetManifest& manifest,
                                         const WindowSpec& window,
                                         const MsiParams& params);

std::map<int, double> class_cmsi_from_windows(
    const std::vector<MsiWindow>& windows);

// Everything an evaluation needs, loaded once: resampled series, calibrated
// virtual data, extracted feature windows, and per-class cMSI.
struct LoadedData {
    std::vector<FeatureWindow> real_train;
    std::vector<FeatureWindow> real_test;
    std::vector<FeatureWindow> virtual_train;
    std::map<int, double> class_cmsi;
    std::map<int, std::string> class_names;
};

LoadedData load_experiment_data(const ExperimentConfig& config,
                                bool with_msi = true);

struct EvalRun {
    std::uint64_t seed = 0;
    std::vector<double> fold_f1;
    double mean_f1 = 0.0;
    std::vector<double> fold_f1_moments;  // eating only
    double mean_f1_moments = 0.0;
};

struct WindowPrediction {
    std::string source;
    double t_start = 0.0;
    double t_end = 0.0;
    int pred = 0;
};

struct EvalResult {
    std::string task;
    bool augmented = false;
    std::vector<EvalRun> runs;
    double mean_f1 = 0.0;
    double std_over_runs = 0.0;   // sample std of per-run means
    double std_over_folds = 0.0;  // sample std of all fold scores pooled
    std::optional<double> mean_f1_moments;
    std::size_t n_real_windows = 0;
    std::size_t n_virtual_windows = 0;
    std::vector<std::vector<WindowPrediction>> predictions;  // eating: per run
};

EvalResult run_eval(const ExperimentConfig& config, const LoadedData& data,
                    bool augmented);

nlohmann::ordered_json eval_report_json(const ExperimentConfig& config,
                                        const EvalResult& result);

struct SweepSeedRun {
    std::uint64_t seed = 0;
    double baseline_f1 = 0.0;
    SweepReport report;
};

struct SweepResult {
    std::map<int, double> class_cmsi;
    std::vector<SweepSeedRun> runs;
    SweepReport aggregate;  // per-cutoff delta_f1 averaged over seeds
};

SweepResult run_sweep(const ExperimentConfig& config, const LoadedData& data);

nlohmann::ordered_json sweep_result_json(const ExperimentConfig& config,
                                         const SweepResult& result);

void write_prediction_csv(std::ostream& out,
                          const std::vector<WindowPrediction>& rows);
std::vector<WindowPrediction> read_prediction_csv(std::istream& in);

// Groups predictions by source, clusters positive window centers per group,
// and returns the moments with globally increasing cluster ids.
std::vector<Moment> aggregate_moments(const std::vector<WindowPrediction>& rows,
                                      const MomentParams& params,
                                      int positive_class = 1);

}  // namespace msihar

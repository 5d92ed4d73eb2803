#include "msihar/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "msihar/detail/json.hpp"

#include "msihar/csv_io.hpp"
#include "msihar/flow_io.hpp"
#include "msihar/metrics.hpp"
#include "msihar/resample.hpp"
#include "msihar/rng.hpp"
#include "msihar/version.hpp"

namespace msihar {
namespace {

double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::ordered_json& doc,
                                             const std::filesystem::path& base_dir) {
    if (!doc.is_object()) {
        throw ConfigInvalid("experiment config must be a JSON object");
    }
    ExperimentConfig cfg;
    try {
        if (!doc.contains("manifest")) {
            throw ConfigInvalid("config is missing \"manifest\"");
        }
        std::filesystem::path manifest = doc.at("manifest").get<std::string>();
        cfg.manifest_path =
            manifest.is_absolute() ? manifest : base_dir / manifest;
        cfg.task = doc.value("task", cfg.task);
        if (doc.contains("window")) {
            const auto& w = doc.at("window");
            cfg.window.length_s = w.value("length_s", cfg.window.length_s);
            cfg.window.step_s = w.value("step_s", cfg.window.step_s);
            cfg.window.rate_hz = w.value("rate_hz", cfg.window.rate_hz);
        }
        cfg.features = feature_set_from_string(
            doc.value("features", to_string(cfg.features)));
        cfg.ecdf_points = doc.value("ecdf_points", cfg.ecdf_points);
        if (doc.contains("forest")) {
            const auto& f = doc.at("forest");
            cfg.forest.n_trees = f.value("n_trees", cfg.forest.n_trees);
            cfg.forest.max_features = f.value("max_features", cfg.forest.max_features);
            cfg.forest.min_samples_leaf =
                f.value("min_samples_leaf", cfg.forest.min_samples_leaf);
            cfg.forest.max_depth = f.value("max_depth", cfg.forest.max_depth);
            cfg.forest.bootstrap = f.value("bootstrap", cfg.forest.bootstrap);
            cfg.forest.seed = f.value("seed", cfg.forest.seed);
        }
        if (doc.contains("moments")) {
            const auto& m = doc.at("moments");
            cfg.moments.eps_s = m.value("eps_s", cfg.moments.eps_s);
            cfg.moments.min_pts = m.value("min_pts", cfg.moments.min_pts);
        }
        if (doc.contains("msi")) {
            const auto& m = doc.at("msi");
            cfg.msi.patch_fraction = m.value("patch_fraction", cfg.msi.patch_fraction);
            cfg.msi.w = m.value("w", cfg.msi.w);
            cfg.msi.min_valid_fraction =
                m.value("min_valid_fraction", cfg.msi.min_valid_fraction);
            cfg.msi.min_confidence = m.value("min_confidence", cfg.msi.min_confidence);
        }
        cfg.sweep_mode =
            sweep_mode_from_string(doc.value("sweep_mode", to_string(cfg.sweep_mode)));
        if (doc.contains("seeds")) {
            cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        }
        cfg.fold_seed = doc.value("fold_seed", cfg.fold_seed);
        cfg.folds = doc.value("folds", cfg.folds);
        cfg.positive_class = doc.value("positive_class", cfg.positive_class);
        cfg.spline_knots = doc.value("spline_knots", cfg.spline_knots);
        std::filesystem::path out = doc.value("output_dir", cfg.output_dir.string());
        cfg.output_dir = out.is_absolute() ? out : base_dir / out;
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("bad experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigInvalid("cannot open config file " + path.string());
    }
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid("config " + path.string() + " is not valid JSON: " +
                            e.what());
    }
    return from_json(doc, path.has_parent_path() ? path.parent_path()
                                                 : std::filesystem::path("."));
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json doc;
    doc["manifest"] = manifest_path.string();
    doc["task"] = task;
    doc["window"] = {{"length_s", window.length_s},
                     {"step_s", window.step_s},
                     {"rate_hz", window.rate_hz}};
    doc["features"] = to_string(features);
    doc["ecdf_points"] = ecdf_points;
    doc["forest"] = {{"n_trees", forest.n_trees},
                     {"max_features", forest.max_features},
                     {"min_samples_leaf", forest.min_samples_leaf},
                     {"max_depth", forest.max_depth},
                     {"bootstrap", forest.bootstrap},
                     {"seed", forest.seed}};
    doc["moments"] = {{"eps_s", moments.eps_s}, {"min_pts", moments.min_pts}};
    doc["msi"] = {{"patch_fraction", msi.patch_fraction},
                  {"w", msi.w},
                  {"min_valid_fraction", msi.min_valid_fraction},
                  {"min_confidence", msi.min_confidence}};
    doc["sweep_mode"] = to_string(sweep_mode);
    doc["seeds"] = seeds;
    doc["fold_seed"] = fold_seed;
    doc["folds"] = folds;
    doc["positive_class"] = positive_class;
    doc["spline_knots"] = spline_knots;
    doc["output_dir"] = output_dir.string();
    return doc;
}

void ExperimentConfig::validate() const {
    if (task != "daily" && task != "eating") {
        throw ConfigInvalid("task must be \"daily\" or \"eating\", got \"" + task +
                            "\"");
    }
    if (seeds.empty()) {
        throw ConfigInvalid("seeds must be nonempty");
    }
    if (!(window.length_s > 0.0) || !(window.step_s > 0.0) ||
        window.step_s > window.length_s || !(window.rate_hz > 0.0)) {
        throw ConfigInvalid("window spec needs 0 < step_s <= length_s and rate_hz > 0");
    }
    if (folds < 2) {
        throw ConfigInvalid("folds must be at least 2");
    }
    if (ecdf_points < 2) {
        throw ConfigInvalid("ecdf_points must be at least 2");
    }
    if (forest.n_trees < 1 || forest.min_samples_leaf < 1) {
        throw ConfigInvalid("forest needs n_trees >= 1 and min_samples_leaf >= 1");
    }
    if (task == "eating" && (!(moments.eps_s > 0.0) || moments.min_pts < 1)) {
        throw ConfigInvalid("eating task needs eps_s > 0 and min_pts >= 1");
    }
    if (!(msi.patch_fraction > 0.0) || !(msi.w > 0.0)) {
        throw ConfigInvalid("msi params need patch_fraction > 0 and w > 0");
    }
    if (spline_knots < 0) {
        throw ConfigInvalid("spline_knots must be nonnegative");
    }
}

std::vector<MsiWindow> video_msi_windows(const DatasetManifest& manifest,
                                         const WindowSpec& window,
                                         const MsiParams& params) {
    std::vector<MsiWindow> out;
    for (const auto& video : manifest.videos()) {
        FlowSequence seq = load_flow_sequence(video.flow_path);
        if (!seq.normalized()) {
            std::vector<FlowField> normalized;
            normalized.reserve(seq.frames().size());
            for (const auto& f : seq.frames()) normalized.push_back(normalize_flow(f));
            seq = FlowSequence(std::move(normalized), seq.fps(), seq.source_id());
        }
        const PoseTrack pose = load_pose_track(video.pose_path);
        const double duration = seq.duration_s();
        for (double t = 0.0; t + window.length_s <= duration + 1e-9;
             t += window.step_s) {
            try {
                MsiWindow w = window_msi_for_segment(
                    seq, pose, t, std::min(t + window.length_s, duration), params);
                w.class_id = video.class_id;
                w.source_id = video.id;
                out.push_back(std::move(w));
            } catch (const InsufficientValidFrames&) {
                // window has no usable keypoints; skip it
            }
        }
    }
    return out;
}

std::map<int, double> class_cmsi_from_windows(
    const std::vector<MsiWindow>& windows) {
    std::map<int, std::vector<double>> by_class;
    for (const auto& w : windows) by_class[w.class_id].push_back(w.msi);
    std::map<int, double> cmsi;
    for (const auto& [cls, values] : by_class) {
        cmsi[cls] = class_msi_mode(values);
    }
    return cmsi;
}

namespace {

struct VideoAssets {
    FlowSequence seq;
    PoseTrack pose;
};

}  // namespace

LoadedData load_experiment_data(const ExperimentConfig& config, bool with_msi) {
    const DatasetManifest manifest = DatasetManifest::load(config.manifest_path);
    LoadedData data;
    data.class_names = manifest.classes();

    // Resample everything onto the analysis rate first; calibration then works
    // with the statistics the windows actually see.
    std::vector<ImuSeries> real_train_series;
    std::vector<ImuSeries> real_test_series;
    std::vector<const ImuEntry*> real_train_entries;
    std::vector<const ImuEntry*> real_test_entries;
    std::vector<ImuSeries> virtual_series;
    std::vector<const ImuEntry*> virtual_entries;
    for (const auto& entry : manifest.imu()) {
        ImuSeries series =
            resample_linear(load_imu_csv(entry.path, entry.provenance),
                            config.window.rate_hz);
        if (entry.provenance == Provenance::Virtual) {
            virtual_series.push_back(std::move(series));
            virtual_entries.push_back(&entry);
        } else if (entry.split == "test") {
            real_test_series.push_back(std::move(series));
            real_test_entries.push_back(&entry);
        } else {
            real_train_series.push_back(std::move(series));
            real_train_entries.push_back(&entry);
        }
    }
    if (real_train_series.empty()) {
        throw DataLoadFailed("manifest has no real training streams");
    }

    // One shared affine maps the virtual corpus onto the real training
    // corpus. Matching each stream's own moments instead would flatten the
    // between-stream amplitude differences that carry the activity signal.
    const AxisStats pooled_real = pooled_axis_stats(real_train_series);

    auto window_features = [&](const ImuSeries& series, const ImuEntry& entry) {
        auto windows = extract_windows(series, config.window, config.features,
                                       config.ecdf_points);
        for (auto& w : windows) {
            if (!entry.subject.empty()) w.subject_id = entry.subject;
            w.source_id = entry.source.empty()
                              ? entry.path.stem().string()
                              : entry.source;
        }
        return windows;
    };

    for (std::size_t i = 0; i < real_train_series.size(); ++i) {
        auto windows = window_features(real_train_series[i], *real_train_entries[i]);
        data.real_train.insert(data.real_train.end(), windows.begin(), windows.end());
    }
    for (std::size_t i = 0; i < real_test_series.size(); ++i) {
        auto windows = window_features(real_test_series[i], *real_test_entries[i]);
        data.real_test.insert(data.real_test.end(), windows.begin(), windows.end());
    }

    // Video assets for matching virtual windows back to flow segments.
    std::map<std::string, VideoAssets> videos;
    std::map<std::string, int> video_class;
    if (with_msi) {
        for (const auto& video : manifest.videos()) {
            FlowSequence seq = load_flow_sequence(video.flow_path);
            if (!seq.normalized()) {
                std::vector<FlowField> normalized;
                normalized.reserve(seq.frames().size());
                for (const auto& f : seq.frames()) {
                    normalized.push_back(normalize_flow(f));
                }
                seq = FlowSequence(std::move(normalized), seq.fps(), seq.source_id());
            }
            video_class[video.id] = video.class_id;
            videos.emplace(video.id,
                           VideoAssets{std::move(seq), load_pose_track(video.pose_path)});
        }
    }

    const AxisStats pooled_virtual = virtual_series.empty()
                                         ? AxisStats{}
                                         : pooled_axis_stats(virtual_series);
    for (std::size_t i = 0; i < virtual_series.size(); ++i) {
        const ImuEntry& entry = *virtual_entries[i];
        const ImuSeries calibrated =
            calibrate_virtual(virtual_series[i], pooled_virtual, pooled_real);
        auto windows = window_features(calibrated, entry);
        const auto video_it = videos.find(entry.source);
        for (auto& w : windows) {
            if (video_it != videos.end()) {
                try {
                    w.msi = window_msi_for_segment(video_it->second.seq,
                                                   video_it->second.pose, w.t_start,
                                                   w.t_end, config.msi)
                                .msi;
                } catch (const Error&) {
                    // no matching usable segment; leave msi unset
                }
            }
            data.virtual_train.push_back(std::move(w));
        }
    }

    if (with_msi) {
        auto msi_windows = video_msi_windows(manifest, config.window, config.msi);
        data.class_cmsi = class_cmsi_from_windows(msi_windows);
    }
    return data;
}

namespace {

struct Matrix {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
};

Matrix to_matrix(const std::vector<const FeatureWindow*>& windows) {
    Matrix m;
    m.X.reserve(windows.size());
    m.y.reserve(windows.size());
    for (const auto* w : windows) {
        m.X.push_back(w->features);
        m.y.push_back(w->label);
    }
    return m;
}

double eval_split(const std::vector<const FeatureWindow*>& train,
                  const std::vector<const FeatureWindow*>& test,
                  const ForestParams& params, const std::string& task,
                  int positive_class) {
    const Matrix train_m = to_matrix(train);
    const Matrix test_m = to_matrix(test);
    const Forest forest = train_forest(train_m.X, train_m.y, params);
    const auto pred = forest.predict(test_m.X);
    return task == "eating" ? binary_f1(pred, test_m.y, positive_class)
                            : macro_f1(pred, test_m.y);
}

}  // namespace

EvalResult run_eval(const ExperimentConfig& config, const LoadedData& data,
                    bool augmented) {
    EvalResult result;
    result.task = config.task;
    result.augmented = augmented;
    result.n_virtual_windows = augmented ? data.virtual_train.size() : 0;

    std::vector<const FeatureWindow*> virtual_ptrs;
    if (augmented) {
        for (const auto& w : data.virtual_train) virtual_ptrs.push_back(&w);
    }

    std::vector<double> all_fold_scores;
    std::vector<double> run_means;

    if (config.task == "daily") {
        result.n_real_windows = data.real_train.size();
        std::vector<int> labels;
        for (const auto& w : data.real_train) labels.push_back(w.label);
        const auto folds = stratified_kfold(labels, config.folds, config.fold_seed);
        for (std::uint64_t seed : config.seeds) {
            EvalRun run;
            run.seed = seed;
            const auto fold_seeds = derive_seeds(seed, folds.size());
            for (std::size_t f = 0; f < folds.size(); ++f) {
                std::vector<char> in_test(data.real_train.size(), 0);
                for (std::size_t idx : folds[f]) in_test[idx] = 1;
                std::vector<const FeatureWindow*> train = virtual_ptrs;
                std::vector<const FeatureWindow*> test;
                for (std::size_t i = 0; i < data.real_train.size(); ++i) {
                    (in_test[i] ? test : train).push_back(&data.real_train[i]);
                }
                ForestParams params = config.forest;
                params.seed = fold_seeds[f];
                run.fold_f1.push_back(eval_split(train, test, params, config.task,
                                                 config.positive_class));
            }
            run.mean_f1 = mean_of(run.fold_f1);
            all_fold_scores.insert(all_fold_scores.end(), run.fold_f1.begin(),
                                   run.fold_f1.end());
            run_means.push_back(run.mean_f1);
            result.runs.push_back(std::move(run));
        }
    } else {
        if (data.real_test.empty()) {
            throw DataLoadFailed("eating task needs real streams with split=test");
        }
        result.n_real_windows = data.real_train.size() + data.real_test.size();
        std::vector<const FeatureWindow*> train;
        for (const auto& w : data.real_train) train.push_back(&w);
        train.insert(train.end(), virtual_ptrs.begin(), virtual_ptrs.end());
        std::vector<const FeatureWindow*> test;
        for (const auto& w : data.real_test) test.push_back(&w);
        const Matrix train_m = to_matrix(train);
        const Matrix test_m = to_matrix(test);

        std::vector<double> moment_means;
        for (std::uint64_t seed : config.seeds) {
            EvalRun run;
            run.seed = seed;
            ForestParams params = config.forest;
            params.seed = seed;
            const Forest forest = train_forest(train_m.X, train_m.y, params);
            const auto pred = forest.predict(test_m.X);
            run.fold_f1.push_back(binary_f1(pred, test_m.y, config.positive_class));
            run.mean_f1 = run.fold_f1.front();

            // DBSCAN aggregation over positive window centers, per stream.
            std::vector<WindowPrediction> rows;
            rows.reserve(test.size());
            for (std::size_t i = 0; i < test.size(); ++i) {
                rows.push_back({test[i]->source_id, test[i]->t_start,
                                test[i]->t_end, pred[i]});
            }
            std::vector<int> aggregated(test.size(), 0);
            std::map<std::string, std::vector<std::size_t>> by_source;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                by_source[rows[i].source].push_back(i);
            }
            for (const auto& [source, indices] : by_source) {
                std::vector<std::size_t> positives;
                for (std::size_t i : indices) {
                    if (rows[i].pred == config.positive_class) positives.push_back(i);
                }
                std::sort(positives.begin(), positives.end(),
                          [&](std::size_t a, std::size_t b) {
                              const double ca = 0.5 * (rows[a].t_start + rows[a].t_end);
                              const double cb = 0.5 * (rows[b].t_start + rows[b].t_end);
                              return ca < cb;
                          });
                std::vector<double> centers;
                for (std::size_t i : positives) {
                    centers.push_back(0.5 * (rows[i].t_start + rows[i].t_end));
                }
                const auto clustering = dbscan_1d(centers, config.moments);
                for (const auto& cluster : clustering.clusters) {
                    for (std::size_t member : cluster) {
                        aggregated[positives[member]] = config.positive_class;
                    }
                }
            }
            std::vector<int> truth;
            for (const auto* w : test) truth.push_back(w->label);
            // Non-positive aggregated slots count as "not the positive class";
            // any off-positive value works for binary scoring.
            run.fold_f1_moments.push_back(
                binary_f1(aggregated, truth, config.positive_class));
            run.mean_f1_moments = run.fold_f1_moments.front();
            moment_means.push_back(run.mean_f1_moments);

            all_fold_scores.push_back(run.mean_f1);
            run_means.push_back(run.mean_f1);
            result.predictions.push_back(std::move(rows));
            result.runs.push_back(std::move(run));
        }
        result.mean_f1_moments = mean_of(moment_means);
    }

    result.mean_f1 = mean_of(run_means);
    result.std_over_runs = sample_std(run_means);
    result.std_over_folds = sample_std(all_fold_scores);
    return result;
}

nlohmann::ordered_json eval_report_json(const ExperimentConfig& config,
                                        const EvalResult& result) {
    nlohmann::ordered_json doc;
    doc["version"] = kVersion;
    doc["kind"] = "eval";
    doc["config"] = config.to_json();
    doc["task"] = result.task;
    doc["augmented"] = result.augmented;
    doc["n_real_windows"] = result.n_real_windows;
    doc["n_virtual_windows"] = result.n_virtual_windows;
    doc["runs"] = nlohmann::ordered_json::array();
    for (const auto& run : result.runs) {
        nlohmann::ordered_json rj;
        rj["seed"] = run.seed;
        rj["fold_f1"] = run.fold_f1;
        rj["mean_f1"] = run.mean_f1;
        if (!run.fold_f1_moments.empty()) {
            rj["fold_f1_moments"] = run.fold_f1_moments;
            rj["mean_f1_moments"] = run.mean_f1_moments;
        }
        doc["runs"].push_back(std::move(rj));
    }
    doc["macro_f1"] = result.mean_f1;
    doc["std_over_runs"] = result.std_over_runs;
    doc["std_over_folds"] = result.std_over_folds;
    if (result.mean_f1_moments.has_value()) {
        doc["mean_f1_moments"] = *result.mean_f1_moments;
    }
    return doc;
}

SweepResult run_sweep(const ExperimentConfig& config, const LoadedData& data) {
    if (data.class_cmsi.empty()) {
        throw EmptyClassSet("sweep needs per-class cMSI values (manifest videos)");
    }
    if (data.real_test.empty()) {
        throw DataLoadFailed("sweep needs real streams with split=test");
    }
    SweepResult result;
    result.class_cmsi = data.class_cmsi;

    std::vector<const FeatureWindow*> real_train;
    for (const auto& w : data.real_train) real_train.push_back(&w);
    std::vector<const FeatureWindow*> test_all;
    for (const auto& w : data.real_test) test_all.push_back(&w);

    for (std::uint64_t seed : config.seeds) {
        SweepSeedRun run;
        run.seed = seed;
        ForestParams params = config.forest;
        params.seed = seed;

        run.baseline_f1 = eval_split(real_train, test_all, params, "daily", 0);

        auto evaluate = [&](const std::vector<int>& enabled) {
            const std::set<int> enabled_set(enabled.begin(), enabled.end());
            std::vector<const FeatureWindow*> train;
            std::vector<const FeatureWindow*> test;
            if (config.sweep_mode == SweepMode::VirtualOnly) {
                train = real_train;
                test = test_all;
            } else {
                for (const auto* w : real_train) {
                    if (enabled_set.count(w->label)) train.push_back(w);
                }
                for (const auto* w : test_all) {
                    if (enabled_set.count(w->label)) test.push_back(w);
                }
            }
            for (const auto& w : data.virtual_train) {
                if (enabled_set.count(w.label)) train.push_back(&w);
            }
            if (train.empty() || test.empty()) {
                throw DataLoadFailed("sweep cutoff leaves no data to evaluate");
            }
            const double f1 =
                eval_split(train, test, params, "daily", 0);
            if (config.sweep_mode == SweepMode::VirtualOnly) {
                return f1 - run.baseline_f1;
            }
            std::vector<const FeatureWindow*> base_train;
            for (const auto* w : real_train) {
                if (enabled_set.count(w->label)) base_train.push_back(w);
            }
            return f1 - eval_split(base_train, test, params, "daily", 0);
        };
        const auto points = cutoff_sweep(data.class_cmsi, evaluate, config.sweep_mode);
        run.report = analyze_sweep(points, config.spline_knots);
        result.runs.push_back(std::move(run));
    }

    // Average delta_f1 over seeds per cutoff and analyze the mean curve.
    std::vector<SweepPoint> mean_points = result.runs.front().report.points;
    for (std::size_t p = 0; p < mean_points.size(); ++p) {
        double sum = 0.0;
        for (const auto& run : result.runs) sum += run.report.points[p].delta_f1;
        mean_points[p].delta_f1 = sum / static_cast<double>(result.runs.size());
    }
    result.aggregate = analyze_sweep(mean_points, config.spline_knots);
    return result;
}

nlohmann::ordered_json sweep_result_json(const ExperimentConfig& config,
                                         const SweepResult& result) {
    nlohmann::ordered_json doc;
    doc["version"] = kVersion;
    doc["kind"] = "sweep";
    doc["config"] = config.to_json();
    doc["class_cmsi"] = nlohmann::ordered_json::object();
    for (const auto& [cls, cmsi] : result.class_cmsi) {
        doc["class_cmsi"][std::to_string(cls)] = cmsi;
    }
    doc["runs"] = nlohmann::ordered_json::array();
    for (const auto& run : result.runs) {
        nlohmann::ordered_json rj;
        rj["seed"] = run.seed;
        rj["baseline_f1"] = run.baseline_f1;
        rj["report"] = sweep_report_json(run.report);
        doc["runs"].push_back(std::move(rj));
    }
    doc["aggregate"] = sweep_report_json(result.aggregate);
    return doc;
}

void write_prediction_csv(std::ostream& out,
                          const std::vector<WindowPrediction>& rows) {
    out << "source,t_start,t_end,pred\n";
    for (const auto& r : rows) {
        out << r.source << ',' << format_double(r.t_start) << ','
            << format_double(r.t_end) << ',' << r.pred << '\n';
    }
}

std::vector<WindowPrediction> read_prediction_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "source,t_start,t_end,pred") {
        throw MalformedHeader("expected prediction CSV header, got \"" + line + "\"");
    }
    std::vector<WindowPrediction> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) {
            throw MalformedRow("line " + std::to_string(line_no) + ": expected 4 fields");
        }
        WindowPrediction r;
        try {
            r.source = fields[0];
            r.t_start = std::stod(fields[1]);
            r.t_end = std::stod(fields[2]);
            r.pred = std::stoi(fields[3]);
        } catch (const std::exception&) {
            throw MalformedRow("line " + std::to_string(line_no) + ": bad numeric field");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<Moment> aggregate_moments(const std::vector<WindowPrediction>& rows,
                                      const MomentParams& params,
                                      int positive_class) {
    std::map<std::string, std::vector<double>> centers_by_source;
    for (const auto& r : rows) {
        if (r.pred == positive_class) {
            centers_by_source[r.source].push_back(0.5 * (r.t_start + r.t_end));
        }
    }
    std::vector<Moment> moments;
    int next_id = 0;
    for (auto& [source, centers] : centers_by_source) {
        std::sort(centers.begin(), centers.end());
        const auto clustering = dbscan_1d(centers, params);
        auto group = clusters_to_moments(clustering.clusters, centers, next_id);
        next_id += static_cast<int>(group.size());
        moments.insert(moments.end(), group.begin(), group.end());
    }
    return moments;
}

}  // namespace msihar

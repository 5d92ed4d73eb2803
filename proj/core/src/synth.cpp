#include "msihar/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "msihar/csv_io.hpp"
#include "msihar/errors.hpp"
#include "msihar/flow_io.hpp"
#include "msihar/manifest.hpp"
#include "msihar/rng.hpp"

namespace msihar {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<float> gaussian_bump_plane(int height, int width, double center_row,
                                       double center_col, double peak,
                                       double sigma) {
    std::vector<float> plane(static_cast<std::size_t>(height) * width);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int r = 0; r < height; ++r) {
        const double dr = r - center_row;
        for (int c = 0; c < width; ++c) {
            const double dc = c - center_col;
            plane[static_cast<std::size_t>(r) * width + c] =
                static_cast<float>(peak * std::exp(-(dr * dr + dc * dc) * inv));
        }
    }
    return plane;
}

// Random tone bank in the body-motion band, one draw per axis. Used both
// for tracker drift (in pixels, so double differentiation leaves
// band-limited error rather than white noise; frame-rate jitter is assumed
// smoothed away by the keypoint filter) and for the slow baseline wander
// that orientation drift leaks into real accelerometer axes.
constexpr int kBankTones = 12;
constexpr double kBankLowHz = 0.3;
constexpr double kBankHighHz = 2.0;

class ToneBank {
  public:
    ToneBank(SplitMix64& rng, double std_dev)
        : scale_(std_dev * std::sqrt(2.0 / kBankTones)) {
        for (auto& axis : tones_) {
            for (auto& tone : axis) {
                tone = {kTwoPi * rng.next_uniform(kBankLowHz, kBankHighHz),
                        rng.next_uniform(0.0, kTwoPi)};
            }
        }
    }

    double at(int axis, double t) const {
        double sum = 0.0;
        for (const auto& tone : tones_[axis]) {
            sum += std::sin(tone[0] * t + tone[1]);
        }
        return scale_ * sum;
    }

  private:
    std::array<std::array<std::array<double, 2>, kBankTones>, 3> tones_;
    double scale_;
};

// Body motion is a fundamental plus a few overtones with random weights
// and phases. pos() is the exact double integral of accel() scaled by
// omega^2, so a track differentiated twice carries the same harmonic
// profile, and the same per-draw weight factor, as the real sensor.
constexpr int kHarmonics = 4;

class HarmonicMix {
  public:
    explicit HarmonicMix(SplitMix64& rng) {
        for (int h = 0; h < kHarmonics; ++h) {
            w_[h] = h == 0 ? 1.0 : rng.next_uniform(0.25, 0.7);
            phase_[h] = rng.next_uniform(0.0, kTwoPi);
        }
    }

    double accel(double omega_t) const {
        double sum = 0.0;
        for (int h = 0; h < kHarmonics; ++h) {
            sum += w_[h] * std::sin((h + 1) * omega_t + phase_[h]);
        }
        return sum;
    }

    double pos(double omega_t) const {
        double sum = 0.0;
        for (int h = 0; h < kHarmonics; ++h) {
            const double hh = (h + 1.0) * (h + 1.0);
            sum += w_[h] / hh * std::sin((h + 1) * omega_t + phase_[h]);
        }
        return sum;
    }

  private:
    std::array<double, kHarmonics> w_;
    std::array<double, kHarmonics> phase_;
};

}  // namespace

SynthSummary generate_fixture(const SynthParams& p,
                              const std::filesystem::path& out_dir) {
    if (p.n_classes < 1 || p.videos_per_class < 1 || p.real_train_per_class < 1 ||
        !(p.video_fps > 0.0) || !(p.real_rate_hz > 0.0) ||
        !(p.amplitude_span > 0.0) || !(p.amp_jitter >= 1.0) ||
        !(p.video_amp_jitter >= 1.0) || p.frame_height < 3 || p.frame_width < 3) {
        throw ConfigInvalid("synth parameters out of range");
    }
    std::filesystem::create_directories(out_dir / "videos");
    std::filesystem::create_directories(out_dir / "imu");

    SynthSummary summary;
    SplitMix64 rng(p.seed);
    // Amplitude draws are stratified: stream i of n draws log-uniformly
    // from the i-th slice of its cohort's band, so small cohorts still
    // cover the band instead of clumping.
    const double band = std::log(p.amp_jitter);
    const double vband = std::log(p.video_amp_jitter);
    auto banded_jitter = [&rng](double lo, double hi, int idx, int n) {
        const double width = (hi - lo) / n;
        return std::exp(lo + width * (idx + rng.next_uniform(0.0, 1.0)));
    };
    const int frames = static_cast<int>(std::llround(p.video_seconds * p.video_fps));
    const double center_row = 0.5 * (p.frame_height - 1);
    const double center_col = 0.5 * (p.frame_width - 1);

    std::map<int, std::string> classes;
    std::vector<ImuEntry> imu_entries;
    std::vector<VideoEntry> video_entries;

    for (int c = 0; c < p.n_classes; ++c) {
        const double frac =
            p.n_classes == 1 ? 0.0
                             : static_cast<double>(c) / (p.n_classes - 1);
        const double amplitude = p.base_amplitude_px * std::pow(p.amplitude_span, frac);
        const double freq = p.base_freq_hz + c * p.freq_step_hz;
        // Amplitude spread between people and videos grows with the motion
        // itself: everyone's idle sway looks alike, while energetic moves
        // differ a lot from person to person.
        const double class_band = band * frac;
        const double class_vband = vband * frac;
        summary.class_amplitude_px.push_back(amplitude);
        summary.class_freq_hz.push_back(freq);
        classes[c] = "activity_" + std::to_string(c);

        const double omega = kTwoPi * freq;

        for (int v = 0; v < p.videos_per_class; ++v) {
            const std::string video_id =
                "class" + std::to_string(c) + "_v" + std::to_string(v);
            const HarmonicMix mix(rng);
            const double video_amp = amplitude * banded_jitter(-class_vband,
                                                               class_vband, v,
                                                               p.videos_per_class);

            // True keypoint rows for image frames 0..frames.
            std::vector<double> key_row(frames + 1);
            for (int t = 0; t <= frames; ++t) {
                key_row[t] =
                    center_row + video_amp * mix.pos(omega * t / p.video_fps);
            }

            std::vector<FlowField> fields;
            fields.reserve(frames);
            std::vector<PoseEntry> pose_rows;
            pose_rows.reserve(frames);
            for (int t = 0; t < frames; ++t) {
                const double displacement = key_row[t + 1] - key_row[t];
                auto u = gaussian_bump_plane(p.frame_height, p.frame_width,
                                             key_row[t], center_col, displacement,
                                             p.bump_sigma_px);
                std::vector<float> v_plane(u.size(), 0.0f);
                fields.emplace_back(p.frame_height, p.frame_width, std::move(u),
                                    std::move(v_plane), false);
                pose_rows.push_back({t, p.target_joint, center_col, key_row[t],
                                     p.pose_confidence});
            }
            const auto flow_path = out_dir / "videos" / (video_id + ".flow");
            write_flow_sequence(FlowSequence(std::move(fields), p.video_fps, video_id),
                                flow_path);
            const auto pose_path = out_dir / "videos" / (video_id + ".pose.csv");
            write_pose_track(PoseTrack(std::move(pose_rows), p.target_joint),
                             pose_path);
            video_entries.push_back({flow_path, pose_path, c, video_id});

            // Tracked coordinates with drift; the third channel stands in
            // for depth and carries drift only, so no axis is constant.
            const ToneBank drift(rng, p.tracker_noise_px);
            std::vector<std::array<double, 3>> track(frames + 1);
            for (int t = 0; t <= frames; ++t) {
                const double ts = t / p.video_fps;
                track[t] = {key_row[t] + drift.at(0, ts),
                            center_col + drift.at(1, ts), drift.at(2, ts)};
            }
            const double fps2 = p.video_fps * p.video_fps;
            std::vector<double> vt;
            std::vector<std::array<double, 3>> vs;
            std::vector<int> vl;
            for (int t = 1; t < frames; ++t) {
                vt.push_back(t / p.video_fps);
                std::array<double, 3> a{};
                for (int k = 0; k < 3; ++k) {
                    a[k] = (track[t + 1][k] - 2.0 * track[t][k] + track[t - 1][k]) *
                           fps2 * p.px_to_m;
                }
                vs.push_back(a);
                vl.push_back(c);
            }
            const std::string subject = "v" + std::to_string(c);
            ImuSeries virt(std::move(vt), std::move(vs), std::move(vl), p.video_fps,
                           Provenance::Virtual, subject);
            const auto virt_path = out_dir / "imu" / ("virtual_" + video_id + ".csv");
            write_imu_csv(virt, virt_path);
            imu_entries.push_back(
                {virt_path, Provenance::Virtual, subject, video_id, "train"});
        }

        const int n_real = p.real_train_per_class + p.real_test_per_class;
        const int n_samples = static_cast<int>(std::llround(p.real_seconds * p.real_rate_hz)) + 1;
        for (int s = 0; s < n_real; ++s) {
            // Training wearers sit at or above the nominal class amplitude;
            // test wearers span the full band, so the low half of each class
            // is unseen in real training data.
            const bool in_train = s < p.real_train_per_class;
            const double jitter =
                in_train
                    ? banded_jitter(0.0, class_band, s, p.real_train_per_class)
                    : banded_jitter(-class_band, class_band,
                                    s - p.real_train_per_class,
                                    p.real_test_per_class);
            const HarmonicMix mix(rng);
            const double accel_amp = jitter * amplitude * omega * omega * p.px_to_m;
            const ToneBank wander(rng, p.baseline_wander);
            std::vector<double> rt(n_samples);
            std::vector<std::array<double, 3>> rs(n_samples);
            std::vector<int> rl(n_samples, c);
            for (int k = 0; k < n_samples; ++k) {
                const double t = k / p.real_rate_hz;
                rt[k] = t;
                rs[k] = {accel_amp * mix.accel(omega * t) + wander.at(0, t) +
                             p.sensor_noise * rng.next_gaussian(),
                         wander.at(1, t) + p.sensor_noise * rng.next_gaussian(),
                         wander.at(2, t) + p.sensor_noise * rng.next_gaussian()};
            }
            const std::string subject =
                "p" + std::to_string(c) + "_" + std::to_string(s);
            ImuSeries real(std::move(rt), std::move(rs), std::move(rl),
                           p.real_rate_hz, Provenance::Real, subject);
            const std::string stream_id =
                "real_c" + std::to_string(c) + "_s" + std::to_string(s);
            const auto real_path = out_dir / "imu" / (stream_id + ".csv");
            write_imu_csv(real, real_path);
            const std::string split = in_train ? "train" : "test";
            imu_entries.push_back(
                {real_path, Provenance::Real, subject, stream_id, split});
        }
    }

    DatasetManifest manifest(std::move(classes), std::move(imu_entries),
                             std::move(video_entries));
    summary.manifest_path = out_dir / "manifest.json";
    write_manifest(manifest, summary.manifest_path);
    return summary;
}

}  // namespace msihar

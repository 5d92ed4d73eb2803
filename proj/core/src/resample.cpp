#include "msihar/resample.hpp"

#include <algorithm>
#include <cmath>

namespace msihar {

ImuSeries resample_linear(const ImuSeries& series, double target_hz) {
    if (series.size() < 2) {
        throw TooFewSamples("resampling needs at least 2 samples");
    }
    if (!(target_hz > 0.0)) {
        throw ConfigInvalid("target_hz must be positive");
    }
    const auto& t = series.timestamps();
    const double t_first = t.front();
    const double t_last = t.back();
    const double dt = 1.0 / target_hz;
    const double span = t_last - t_first;
    // Keep the endpoint when it lands on the grid within rounding noise.
    const std::size_t count =
        static_cast<std::size_t>(std::floor(span * target_hz + 1e-9)) + 1;

    std::vector<double> out_t(count);
    std::vector<std::array<double, 3>> out_s(count);
    std::vector<int> out_l(count);

    std::size_t hi = 1;  // t[hi-1] <= grid point <= t[hi]
    for (std::size_t k = 0; k < count; ++k) {
        const double tk = t_first + static_cast<double>(k) * dt;
        out_t[k] = tk;
        while (hi + 1 < t.size() && t[hi] < tk) ++hi;
        const double t0 = t[hi - 1];
        const double t1 = t[hi];
        const double w = std::clamp((tk - t0) / (t1 - t0), 0.0, 1.0);
        const auto& s0 = series.samples()[hi - 1];
        const auto& s1 = series.samples()[hi];
        for (int a = 0; a < 3; ++a) {
            out_s[k][a] = s0[a] + w * (s1[a] - s0[a]);
        }
        // Nearest label in time, earlier sample on ties.
        const std::size_t nearest =
            (tk - t0) <= (t1 - tk) ? hi - 1 : hi;
        out_l[k] = series.labels()[nearest];
    }
    return ImuSeries(std::move(out_t), std::move(out_s), std::move(out_l), target_hz,
                     series.provenance(), series.subject_id(), series.unit());
}

}  // namespace msihar

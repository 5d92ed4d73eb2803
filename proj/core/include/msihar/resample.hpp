#pragma once

#include "msihar/types.hpp"

namespace msihar {

// Resamples onto a uniform grid at target_hz spanning [t_first, t_last].
// Axes are linearly interpolated; each output label is the label of the
// nearest input sample in time (ties resolve to the earlier one).
ImuSeries resample_linear(const ImuSeries& series, double target_hz);

}  // namespace msihar

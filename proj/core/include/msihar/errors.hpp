#pragma once

#include <stdexcept>
#include <string>

namespace msihar {

// Base of the toolkit error hierarchy. Every failure a caller can act on
// gets its own subtype so call sites and tests can catch precisely.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define MSIHAR_DEFINE_ERROR(NAME)                                       \
    struct NAME : Error {                                               \
        explicit NAME(const std::string& msg)                           \
            : Error(std::string(#NAME) + ": " + msg) {}                 \
    }

// File and record parsing
MSIHAR_DEFINE_ERROR(MalformedHeader);
MSIHAR_DEFINE_ERROR(MalformedRow);
MSIHAR_DEFINE_ERROR(DimensionMismatch);
MSIHAR_DEFINE_ERROR(NonFiniteValue);
MSIHAR_DEFINE_ERROR(ConfidenceOutOfRange);
MSIHAR_DEFINE_ERROR(NonMonotonicTime);
MSIHAR_DEFINE_ERROR(FlowOutOfRange);

// Resampling and flow estimation
MSIHAR_DEFINE_ERROR(TooFewSamples);
MSIHAR_DEFINE_ERROR(AlreadyNormalized);
MSIHAR_DEFINE_ERROR(FrameTooSmall);

// MSI computation
MSIHAR_DEFINE_ERROR(KeypointOutsideFrame);
MSIHAR_DEFINE_ERROR(EmptySequence);
MSIHAR_DEFINE_ERROR(InsufficientValidFrames);
MSIHAR_DEFINE_ERROR(SegmentOutOfRange);
MSIHAR_DEFINE_ERROR(EmptyInput);

// Pipeline
MSIHAR_DEFINE_ERROR(ZeroVarianceAxis);
MSIHAR_DEFINE_ERROR(EmptyReference);
MSIHAR_DEFINE_ERROR(SeriesTooShort);
MSIHAR_DEFINE_ERROR(EmptyWindow);

// Model
MSIHAR_DEFINE_ERROR(EmptyTraining);
MSIHAR_DEFINE_ERROR(LengthMismatch);
MSIHAR_DEFINE_ERROR(ClassTooSmall);

// Moments
MSIHAR_DEFINE_ERROR(UnsortedInput);

// Analysis
MSIHAR_DEFINE_ERROR(EmptyClassSet);
MSIHAR_DEFINE_ERROR(TooFewPoints);
MSIHAR_DEFINE_ERROR(DegenerateX);
MSIHAR_DEFINE_ERROR(ZeroVariance);

// Experiment driver
MSIHAR_DEFINE_ERROR(ConfigInvalid);
MSIHAR_DEFINE_ERROR(DataLoadFailed);

#undef MSIHAR_DEFINE_ERROR

}  // namespace msihar

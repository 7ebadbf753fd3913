#pragma once

#include <stdexcept>
#include <string>

namespace sensorfix {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Statistical primitives
struct DegenerateVariance : Error { using Error::Error; };
struct EmptyPreselection : Error { using Error::Error; };

// Classifiers
struct SingularCovariance : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// Engine / self-repair
struct LastSensor : Error { using Error::Error; };
struct RepairInProgress : Error { using Error::Error; };
struct AlignmentGap : Error { using Error::Error; };

// Data ingestion
struct MalformedLine : Error { using Error::Error; };
struct MissingFeatureIndex : Error { using Error::Error; };
struct InsufficientRecords : Error { using Error::Error; };

// Synthetic generator
struct OrderingViolation : Error { using Error::Error; };

// Harness / CLI
struct ScheduleOutOfRange : Error { using Error::Error; };
struct ChecksumMismatch : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace sensorfix

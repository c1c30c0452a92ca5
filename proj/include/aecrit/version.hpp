#pragma once

namespace aecrit {

inline constexpr const char* kToolName = "aecrit";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace aecrit

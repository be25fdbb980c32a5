#pragma once

namespace taulab {

inline constexpr const char kArtifactVersion[] = "0.1.0";
inline constexpr const char kFormatVersion[] = "taulab-1";

}  // namespace taulab

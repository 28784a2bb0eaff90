#pragma once

namespace triage {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace triage

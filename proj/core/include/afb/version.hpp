#pragma once

namespace afb {

inline constexpr const char* kPipelineName = "afb-screen";
inline constexpr const char* kPipelineVersion = "0.1.0";

}  // namespace afb

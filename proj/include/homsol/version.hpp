#pragma once

namespace homsol {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace homsol

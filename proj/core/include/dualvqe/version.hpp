#pragma once

namespace dualvqe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dualvqe

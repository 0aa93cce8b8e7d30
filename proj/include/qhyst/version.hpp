#pragma once

namespace qhyst {

inline constexpr const char* kVersion = "0.1.0";

}

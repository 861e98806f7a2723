#pragma once

namespace ontic {

inline constexpr const char* version = "0.1.0";

}  // namespace ontic

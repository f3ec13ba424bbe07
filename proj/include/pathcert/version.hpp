#pragma once

namespace pathcert {

inline constexpr const char* kVersion = "0.1.0";

}

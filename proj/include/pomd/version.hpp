#pragma once

namespace pomd {
inline constexpr char kVersion[] = "0.1.0";
}

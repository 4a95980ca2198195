#pragma once

namespace oscme {
inline constexpr const char *kVersion = "0.1.0";
}

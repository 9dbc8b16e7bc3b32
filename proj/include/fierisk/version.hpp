#pragma once

namespace fierisk {

inline constexpr const char* kLibraryName = "fierisk";
inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace fierisk

#pragma once

namespace sparsedet {

inline constexpr const char* kSoftwareName = "sparsedet";
inline constexpr const char* kSoftwareVersion = "1.0.0";
// Fixed generator tag embedded in SVG output; bumped only with the layout.
inline constexpr const char* kSvgGeneratorTag = "sparsedet-svg 1";

}  // namespace sparsedet

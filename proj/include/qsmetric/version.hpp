#ifndef QSMETRIC_VERSION_HPP
#define QSMETRIC_VERSION_HPP

namespace qsmetric {

inline constexpr const char* kToolName = "qsmetric";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRngScheme = "splitmix64-ctr-v1";

}  // namespace qsmetric

#endif

#ifndef SWELLFLOW_CONSTANTS_HPP
#define SWELLFLOW_CONSTANTS_HPP

namespace swellflow {

/// Universal gas constant [J/(mol K)].
inline constexpr double kGasConstant = 8.314462618;

/// Standard atmospheric pressure [Pa], default reference for liquids.
inline constexpr double kStandardPressure = 101325.0;

}  // namespace swellflow

#endif

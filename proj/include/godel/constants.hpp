#pragma once

#include <numbers>

namespace godel {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kPi = std::numbers::pi;

/// Numerical tolerances and steps shared by the library, tests and harness.
namespace tol {

inline constexpr double kMetricInverse = 1e-12;
inline constexpr double kChristoffelFdStep = 1e-5;
inline constexpr double kChristoffelFd = 1e-6;
inline constexpr double kRicci = 1e-10;
inline constexpr double kEinstein = 1e-10;
inline constexpr double kChartRoundTrip = 1e-10;
inline constexpr double kIsometryNorm = 1e-8;
inline constexpr double kBoundaryAction = 1e-10;
inline constexpr double kAlphaAlongRay = 1e-6;

inline constexpr double kShellAbsolute = 1e-12;
inline constexpr double kShellBand = 5e-2;
inline constexpr double kDegenerateChart = 1e-10;
inline constexpr double kFactorization = 1e-10;
inline constexpr double kRankThree = 1e-8;
inline constexpr int kMaxHalvings = 20;

inline constexpr double kGeodesicOracle = 1e-6;
inline constexpr double kConservedDrift = 1e-8;
inline constexpr double kCylinder = 1e-10;
inline constexpr double kLightSlope = 1e-3;
inline constexpr double kGeodesicReproduction = 1e-4;

inline constexpr double kStatSigmas = 3.0;
inline constexpr double kKsMinPValue = 0.01;
inline constexpr double kDispersionShrink = 0.5;
inline constexpr double kCylinderTailMedian = 0.05;
inline constexpr double kConcentration = 0.05;
inline constexpr double kConcentrationFraction = 0.95;

}  // namespace tol

namespace defaults {

inline constexpr double kOmega = 1.0;
inline constexpr double kSigma = 1.0;
inline constexpr double kDs = 1e-3;
inline constexpr double kSMax = 10.0;
inline constexpr int kStride = 10;
inline constexpr int kPaths = 200;
inline constexpr double kTailFraction = 0.5;
inline constexpr double kAbortFraction = 0.01;

}  // namespace defaults

}  // namespace godel

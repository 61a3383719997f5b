#pragma once

#include <cmath>

#include "xrt/types.hpp"

// Frozen numerical fixtures, version 2026.08.23-1.
//
// Closed-form oracle values are written as expressions so the provenance is
// visible. Thresholds marked "frozen" were measured by independent
// calibration runs (finer quadrature / alternative formulations) and then
// pinned with a safety margin; tightening them requires re-running the
// calibration, not editing in place.
namespace xrt::fx {

inline constexpr char kVersion[] = "2026.08.23-1";

// --- xray oracles ---
// Line integral of e^{-|x|^2} along the line at distance 1 from the origin:
// int e^{-1-t^2} dt = sqrt(pi) e^{-1}.
inline const double kGaussLine = std::sqrt(kPi) * std::exp(-1.0);
// Radial bound: |u^f| <= int_2^inf e^{-3r} dr = e^{-6}/3 for f = e^{-3 d},
// radially escaping seed at r = 2.
inline const double kRadialUfBound = std::exp(-6.0) / 3.0;

// Frozen calibration thresholds (measured value in the comment).
inline constexpr double kGaussLineTol = 1e-6;          // measured 4e-8
inline constexpr double kQuadOrderRatio = 8.0;         // measured 35.2, 206.3
inline constexpr double kKernelProbeTol = 1e-6;        // measured 4.2e-8
inline constexpr double kTransportTol = 1e-4;          // measured 4.7e-8
inline constexpr double kRowConsistencyTol = 1e-2;     // measured 2.5e-3

// recon: discretization-limited gauge figures on the frozen grids.
// Kernel characterization ||A d(sigma nabla h)|| / (||A||_F ||d(...)||) at
// 128^2: measured 1.5e-5 (96^2: 3.2e-5); bound frozen at 1e-4.
inline constexpr double kKernelCharTol = 1e-4;
// Gauge perturbation ||A p|| / ||b|| at 256^2: measured 1.7e-4; the O(h^2)
// interpolation error of the discretized potential plateaus near 2e-4, so
// the continuum value 0 is certified only through the refinement study
// (5.1e-3 @ 64 -> 7.4e-4 @ 128 -> 1.7e-4 @ 256).
inline constexpr double kGaugeTol = 5e-4;
inline constexpr double kScanRatioFloor = 0.02;        // measured 0.0403
inline constexpr double kScanAngleDeg = 10.0;          // measured 6.0
inline constexpr double kCounterProbeFloor = 0.3;      // measured 0.9998

// decay transfer (acceptance 11), max over d in [0.5, 5]:
// hyperbolic C_a measured 2.43, gradient 3.23; powerlaw C_b measured 2.16,
// gradient 3.85.
inline constexpr double kDecayCa = 4.0;
inline constexpr double kDecayCb = 4.0;
inline constexpr double kDecayCgrad = 6.0;

// P_kappa (kappa = 3) volume growth: f(r)/r measured <= 1.50 on [1, 50].
inline constexpr double kPowerlawVolumeRatio = 2.0;

}  // namespace xrt::fx

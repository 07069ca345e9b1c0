#pragma once

namespace hsumma {

// Hockney point-to-point model: sending m elements costs alpha + m * beta.
// alpha is per-message startup in seconds, beta is seconds per element, and
// gamma is seconds per multiply-add pair of the local update kernel.
// Message sizes are counted in matrix elements throughout; bytes only appear
// in human-readable reports (kBytesPerElement).
struct HockneyParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

inline constexpr int kBytesPerElement = 8;

}  // namespace hsumma

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hybdiff {

enum class SignalKind { sinusoid, constant, polynomial };

/// Clean reference signal v0(t).
///
///   sinusoid:   offset + amplitude * sin(omega * t + phase)
///   constant:   offset
///   polynomial: coeffs[0] + coeffs[1] * t + coeffs[2] * t^2
struct SignalSpec {
  SignalKind kind = SignalKind::sinusoid;
  double amplitude = 2.0;
  double omega = 1.0;
  double phase = 0.0;
  double offset = 0.0;
  std::array<double, 3> coeffs{0.0, 0.0, 0.0};

  friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

struct SignalSample {
  double v0;
  double dv0;
  double ddv0;
};

inline SignalSample sample_clean(const SignalSpec& spec, double t) {
  switch (spec.kind) {
    case SignalKind::sinusoid: {
      const double arg = spec.omega * t + spec.phase;
      const double s = std::sin(arg);
      const double c = std::cos(arg);
      return {spec.offset + spec.amplitude * s, spec.amplitude * spec.omega * c,
              -spec.amplitude * spec.omega * spec.omega * s};
    }
    case SignalKind::constant:
      return {spec.offset, 0.0, 0.0};
    case SignalKind::polynomial: {
      const auto& c = spec.coeffs;
      return {c[0] + t * (c[1] + t * c[2]), c[1] + 2.0 * c[2] * t, 2.0 * c[2]};
    }
  }
  return {0.0, 0.0, 0.0};
}

/// Exact sup_t |v0''(t)|.
inline double second_derivative_bound(const SignalSpec& spec) {
  switch (spec.kind) {
    case SignalKind::sinusoid:
      return std::abs(spec.amplitude) * spec.omega * spec.omega;
    case SignalKind::constant:
      return 0.0;
    case SignalKind::polynomial:
      return std::abs(2.0 * spec.coeffs[2]);
  }
  return 0.0;
}

enum class NoiseKind { none, seeded_uniform, sinusoidal };

/// Bounded measurement noise, |delta| <= epsilon.
///
/// Noise is indexed by integration step: seeded_uniform draws one value per
/// (seed, step) pair, so refining dt produces a different path.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::none;
  double epsilon = 0.0;
  double noise_omega = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

namespace detail {

// splitmix64 finalizer; a counter-based generator gives random access by step.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Noise sample for integration step `step` taken at time `t`.
inline double sample_noise(const NoiseSpec& noise, std::uint64_t step, double t) {
  switch (noise.kind) {
    case NoiseKind::none:
      return 0.0;
    case NoiseKind::sinusoidal:
      return noise.epsilon * std::sin(noise.noise_omega * t);
    case NoiseKind::seeded_uniform: {
      const std::uint64_t bits = detail::mix64(detail::mix64(noise.seed) ^ step);
      // 53 random mantissa bits -> u in [0, 1)
      const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
      return noise.epsilon * (2.0 * u - 1.0);
    }
  }
  return 0.0;
}

inline std::string_view to_string(SignalKind k) {
  switch (k) {
    case SignalKind::sinusoid: return "sinusoid";
    case SignalKind::constant: return "constant";
    case SignalKind::polynomial: return "polynomial";
  }
  return "?";
}

inline std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::seeded_uniform: return "seeded-uniform";
    case NoiseKind::sinusoidal: return "sinusoidal";
  }
  return "?";
}

inline SignalKind parse_signal_kind(std::string_view s) {
  if (s == "sinusoid") return SignalKind::sinusoid;
  if (s == "constant") return SignalKind::constant;
  if (s == "polynomial") return SignalKind::polynomial;
  throw std::invalid_argument("unknown signal kind '" + std::string(s) + "'");
}

inline NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "none") return NoiseKind::none;
  if (s == "seeded-uniform") return NoiseKind::seeded_uniform;
  if (s == "sinusoidal") return NoiseKind::sinusoidal;
  throw std::invalid_argument("unknown noise kind '" + std::string(s) + "'");
}

}  // namespace hybdiff

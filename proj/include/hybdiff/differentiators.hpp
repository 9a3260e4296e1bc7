#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hybdiff {

/// sgn with sgn(0) = 0.
constexpr double sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// |x|^p * sgn(x). p = 0 reduces to sgn(x).
inline double pow_sgn(double x, double p) {
  if (x == 0.0) return 0.0;
  if (p == 0.0) return sgn(x);
  if (p == 1.0) return x;
  if (p == 0.5) return std::copysign(std::sqrt(std::abs(x)), x);
  return std::copysign(std::pow(std::abs(x), p), x);
}

struct DiffState {
  double x1 = 0.0;  // signal estimate
  double x2 = 0.0;  // derivative estimate

  friend bool operator==(const DiffState&, const DiffState&) = default;
};

struct Rates {
  double dx1;
  double dx2;
};

// Gain naming: k1, k3 scale the power terms; k2, k4 scale the linear terms.
// k2 = k4 = 0 gives the purely nonlinear differentiator, alpha = 0 the
// discontinuous hybrid.
struct HybridParams {
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 8.0;
  double k4 = 8.0;
  double alpha = 0.2;

  friend bool operator==(const HybridParams&, const HybridParams&) = default;
};

struct LevantParams {
  double lambda1 = 28.0;  // switching gain on x2
  double lambda2 = 6.0;   // square-root gain on x1

  friend bool operator==(const LevantParams&, const LevantParams&) = default;
};

struct LinearParams {
  double a1 = 2.0;
  double a2 = 1.0;
  double tau = 0.1;

  friend bool operator==(const LinearParams&, const LinearParams&) = default;
};

struct GredParams {
  LevantParams levant{};
  LinearParams linear{0.14, 0.2, 0.1};
  double eps_p = 1.0;
  double c_p = 0.05;
  double eps_d = 0.5;
  double c_d = 0.05;

  friend bool operator==(const GredParams&, const GredParams&) = default;
};

inline Rates hybrid_rhs(const HybridParams& p, const DiffState& s, double v_meas) {
  const double e = s.x1 - v_meas;
  return {s.x2 - p.k1 * pow_sgn(e, 0.5 * (p.alpha + 1.0)) - p.k2 * e,
          -p.k3 * pow_sgn(e, p.alpha) - p.k4 * e};
}

inline Rates levant_rhs(const LevantParams& p, const DiffState& s, double v_meas) {
  const double e = s.x1 - v_meas;
  return {s.x2 - p.lambda2 * pow_sgn(e, 0.5), -p.lambda1 * sgn(e)};
}

inline Rates linear_rhs(const LinearParams& p, const DiffState& s, double v_meas) {
  const double e = s.x1 - v_meas;
  return {s.x2 - (p.a1 / p.tau) * e, -(p.a2 / (p.tau * p.tau)) * e};
}

/// Piecewise-linear blend weight: 0 inside |e| < eps - c, 1 for |e| >= eps,
/// linear ramp in between.
inline double gred_weight(double e, double eps, double c) {
  const double a = std::abs(e);
  if (a < eps - c) return 0.0;
  if (a < eps) return std::clamp((a - eps + c) / c, 0.0, 1.0);
  return 1.0;
}

/// Blends the Levant (x11, x12) and linear (x21, x22) outputs.
inline DiffState gred_output(const DiffState& levant_state, const DiffState& linear_state,
                             const GredParams& p) {
  const double w1 = gred_weight(levant_state.x1 - linear_state.x1, p.eps_p, p.c_p);
  const double w2 = gred_weight(levant_state.x2 - linear_state.x2, p.eps_d, p.c_d);
  return {w1 * linear_state.x1 + (1.0 - w1) * levant_state.x1,
          w2 * linear_state.x2 + (1.0 - w2) * levant_state.x2};
}

enum class FirstOrderKind { smc, linear, power };

/// Scalar example systems: x' = -2 sgn(x), -2 x, -2 |x|^0.5 sgn(x).
inline double first_order_rhs(FirstOrderKind kind, double x) {
  switch (kind) {
    case FirstOrderKind::smc: return -2.0 * sgn(x);
    case FirstOrderKind::linear: return -2.0 * x;
    case FirstOrderKind::power: return -2.0 * pow_sgn(x, 0.5);
  }
  return 0.0;
}

inline std::string_view to_string(FirstOrderKind k) {
  switch (k) {
    case FirstOrderKind::smc: return "smc";
    case FirstOrderKind::linear: return "linear";
    case FirstOrderKind::power: return "power";
  }
  return "?";
}

inline FirstOrderKind parse_first_order_kind(std::string_view s) {
  if (s == "smc") return FirstOrderKind::smc;
  if (s == "linear") return FirstOrderKind::linear;
  if (s == "power") return FirstOrderKind::power;
  throw std::invalid_argument("unknown first-order system '" + std::string(s) + "'");
}

enum class FamilyKind { hybrid, levant, linear, nonlinear, hybrid_discontinuous, gred };

using FamilyParams = std::variant<HybridParams, LevantParams, LinearParams, GredParams>;

inline std::string_view to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::hybrid: return "hybrid";
    case FamilyKind::levant: return "levant";
    case FamilyKind::linear: return "linear";
    case FamilyKind::nonlinear: return "nonlinear";
    case FamilyKind::hybrid_discontinuous: return "hybrid-discontinuous";
    case FamilyKind::gred: return "gred";
  }
  return "?";
}

inline FamilyKind parse_family_kind(std::string_view s) {
  if (s == "hybrid") return FamilyKind::hybrid;
  if (s == "levant") return FamilyKind::levant;
  if (s == "linear") return FamilyKind::linear;
  if (s == "nonlinear") return FamilyKind::nonlinear;
  if (s == "hybrid-discontinuous") return FamilyKind::hybrid_discontinuous;
  if (s == "gred") return FamilyKind::gred;
  throw std::invalid_argument("unknown family '" + std::string(s) + "'");
}

inline bool uses_hybrid_params(FamilyKind k) {
  return k == FamilyKind::hybrid || k == FamilyKind::nonlinear ||
         k == FamilyKind::hybrid_discontinuous;
}

/// Default parameter block for a family.
inline FamilyParams default_params(FamilyKind k) {
  switch (k) {
    case FamilyKind::hybrid: return HybridParams{};
    case FamilyKind::nonlinear: return HybridParams{1.0, 0.0, 8.0, 0.0, 0.2};
    case FamilyKind::hybrid_discontinuous: return HybridParams{1.0, 1.0, 8.0, 8.0, 0.0};
    case FamilyKind::levant: return LevantParams{};
    case FamilyKind::linear: return LinearParams{};
    case FamilyKind::gred: return GredParams{};
  }
  return HybridParams{};
}

struct FieldError {
  std::string field;
  std::string message;
};

namespace detail {

inline void require_positive(std::vector<FieldError>& out, const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) out.push_back({name, "must be finite and > 0"});
}

}  // namespace detail

/// Checks the parameter invariants of `kind`; returns one entry per violation.
inline std::vector<FieldError> validate_params(FamilyKind kind, const FamilyParams& params) {
  std::vector<FieldError> errs;
  using detail::require_positive;
  if (uses_hybrid_params(kind)) {
    const auto* p = std::get_if<HybridParams>(&params);
    if (!p) return {{"kind", "parameter block does not match family"}};
    require_positive(errs, "k1", p->k1);
    require_positive(errs, "k3", p->k3);
    if (kind == FamilyKind::nonlinear) {
      if (p->k2 != 0.0) errs.push_back({"k2", "must be 0 for the nonlinear family"});
      if (p->k4 != 0.0) errs.push_back({"k4", "must be 0 for the nonlinear family"});
    } else {
      require_positive(errs, "k2", p->k2);
      require_positive(errs, "k4", p->k4);
    }
    if (kind == FamilyKind::hybrid_discontinuous) {
      if (p->alpha != 0.0) errs.push_back({"alpha", "must be 0 for hybrid-discontinuous"});
    } else if (!(p->alpha > 0.0 && p->alpha < 1.0)) {
      errs.push_back({"alpha", "must lie in (0, 1)"});
    }
    return errs;
  }
  switch (kind) {
    case FamilyKind::levant: {
      const auto* p = std::get_if<LevantParams>(&params);
      if (!p) return {{"kind", "parameter block does not match family"}};
      require_positive(errs, "lambda1", p->lambda1);
      require_positive(errs, "lambda2", p->lambda2);
      break;
    }
    case FamilyKind::linear: {
      const auto* p = std::get_if<LinearParams>(&params);
      if (!p) return {{"kind", "parameter block does not match family"}};
      require_positive(errs, "a1", p->a1);
      require_positive(errs, "a2", p->a2);
      require_positive(errs, "tau", p->tau);
      break;
    }
    case FamilyKind::gred: {
      const auto* p = std::get_if<GredParams>(&params);
      if (!p) return {{"kind", "parameter block does not match family"}};
      require_positive(errs, "lambda1", p->levant.lambda1);
      require_positive(errs, "lambda2", p->levant.lambda2);
      require_positive(errs, "a1", p->linear.a1);
      require_positive(errs, "a2", p->linear.a2);
      require_positive(errs, "tau", p->linear.tau);
      require_positive(errs, "eps_p", p->eps_p);
      require_positive(errs, "c_p", p->c_p);
      require_positive(errs, "eps_d", p->eps_d);
      require_positive(errs, "c_d", p->c_d);
      if (!(p->c_p < p->eps_p)) errs.push_back({"c_p", "must be < eps_p"});
      if (!(p->c_d < p->eps_d)) errs.push_back({"c_d", "must be < eps_d"});
      break;
    }
    default:
      break;
  }
  return errs;
}

}  // namespace hybdiff

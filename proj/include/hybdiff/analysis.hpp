#pragma once

// Lyapunov certificates, error bounds, linear decay constants and
// describing-function linearizations.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hybdiff/differentiators.hpp"
#include "hybdiff/linalg.hpp"
#include "hybdiff/quadrature.hpp"

namespace hybdiff {

using Vec3 = std::array<double, 3>;

class NonPositiveLambdaMin : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class HypothesisViolated : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct CertificateMatrices {
  Mat3 Pi{};      // V = zeta' lyapunov_form zeta, which adds k1^2/2 at (0,0) after halving Pi
  Mat3 Omega1{};  // weighted by |e1|^((alpha-1)/2) in V'
  // The decomposition of V' is exact when k1 == k2; otherwise the exact
  // (0,0) entry of Omega2 is k2 (k3 + k1^2 (alpha+2)).
  Mat3 Omega2{};
  Vec3 Gamma1{};  // [k1, k2, -2]
  Vec3 Gamma2{};  // [k1, k2, -1]
  // Exact quadratic form of V in zeta: V == zeta' lyapunov_form zeta.
  // Equals (Pi + k1^2 e0 e0') / 2.
  Mat3 lyapunov_form{};
};

inline CertificateMatrices build_hybrid_matrices(const HybridParams& p) {
  const double k1 = p.k1, k2 = p.k2, k3 = p.k3, k4 = p.k4, a = p.alpha;
  CertificateMatrices c;
  c.Pi = {{{4.0 * k3 / (a + 1.0), k1 * k2, -k1},
           {k1 * k2, 2.0 * k4 + k2 * k2, -k2},
           {-k1, -k2, 2.0}}};
  const double h = 0.5 * k1;
  c.Omega1 = {{{h * (2.0 * k3 + k1 * k1 * (a + 1.0)), 0.0, -h * k1 * (a + 1.0)},
               {0.0, h * (2.0 * k4 + k2 * k2 * (a + 5.0)), -h * k2 * (a + 3.0)},
               {-h * k1 * (a + 1.0), -h * k2 * (a + 3.0), h * (a + 1.0)}}};
  c.Omega2 = {{{k2 * (k3 + k2 * k2 * (a + 2.0)), 0.0, 0.0},
               {0.0, k2 * (k4 + k2 * k2), -k2 * k2},
               {0.0, -k2 * k2, k2}}};
  c.Gamma1 = {k1, k2, -2.0};
  c.Gamma2 = {k1, k2, -1.0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c.lyapunov_form[i][j] = 0.5 * c.Pi[i][j];
  c.lyapunov_form[0][0] += 0.5 * k1 * k1;
  return c;
}

struct CertificateEigen {
  double pi_min, pi_max, omega1_min, omega2_min;

  bool positive() const { return pi_min > 0.0 && omega1_min > 0.0 && omega2_min > 0.0; }
};

inline CertificateEigen certificate_eigen(const CertificateMatrices& c) {
  const auto pi = sym_eigenvalues(c.Pi);
  return {pi.front(), pi.back(), lambda_min_sym(c.Omega1), lambda_min_sym(c.Omega2)};
}

/// zeta = [|e1|^((alpha+1)/2) sgn(e1), e1, e2].
inline Vec3 lyapunov_zeta(const HybridParams& p, double e1, double e2) {
  return {pow_sgn(e1, 0.5 * (p.alpha + 1.0)), e1, e2};
}

/// Strong Lyapunov function of the hybrid error system.
inline double lyapunov_V(const HybridParams& p, double e1, double e2) {
  const double a = p.alpha;
  const double s = p.k1 * pow_sgn(e1, 0.5 * (a + 1.0)) + p.k2 * e1 - e2;
  return 2.0 * p.k3 / (a + 1.0) * std::pow(std::abs(e1), a + 1.0) + p.k4 * e1 * e1 +
         0.5 * e2 * e2 + 0.5 * s * s;
}

struct SecondOrderCertificate {
  Mat2 P{};
  Mat2 Q{};
  double theta = 0.0;  // exponent in V' <= -c V^theta
  bool theta_in_unit_interval = false;
};

/// P, Q certificate for the continuous nonlinear second-order system.
inline SecondOrderCertificate build_second_order_certificate(double k1, double k2, double alpha) {
  SecondOrderCertificate c;
  c.P = {{{0.5 * (4.0 * k2 / (alpha + 1.0) + k1 * k1), -0.5 * k1}, {-0.5 * k1, 1.0}}};
  const double h = 0.5 * k1;
  c.Q = {{{h * (2.0 * k2 + k1 * k1 * (alpha + 1.0)), -h * k1 * (alpha + 1.0)},
          {-h * k1 * (alpha + 1.0), h * (alpha + 1.0)}}};
  c.theta = (3.0 * alpha + 1.0) / (2.0 * (alpha + 1.0));
  c.theta_in_unit_interval = c.theta > 0.0 && c.theta < 1.0;
  return c;
}

/// Lyapunov function of the second-order continuous nonlinear system.
inline double lyapunov_V_second_order(double k1, double k2, double alpha, double z1, double z2) {
  const double s = k1 * pow_sgn(z1, 0.5 * (alpha + 1.0)) - z2;
  return 2.0 * k2 / (alpha + 1.0) * std::pow(std::abs(z1), alpha + 1.0) + 0.5 * z2 * z2 +
         0.5 * s * s;
}

/// r^((alpha+1)/(2 alpha)); alpha = 0 is the limit of the exponent -> infinity.
inline double theorem1_bound_from_ratio(double ratio, double alpha) {
  if (ratio <= 0.0) return 0.0;
  if (alpha == 0.0) {
    if (ratio < 1.0) return 0.0;
    return ratio == 1.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return std::pow(ratio, (alpha + 1.0) / (2.0 * alpha));
}

inline double theorem1_ratio(const HybridParams& p, double L2) {
  const auto c = build_hybrid_matrices(p);
  const double om1 = lambda_min_sym(c.Omega1);
  if (!(om1 > 0.0))
    throw NonPositiveLambdaMin("lambda_min(Omega1) = " + std::to_string(om1) + " is not positive");
  return L2 * norm2(c.Gamma1) / om1;
}

/// Residual bound on |zeta|_2 for a noise-free input with |v''| <= L2.
/// A ratio >= 1 still yields a value; callers flag it.
inline double steady_bound_theorem1(const HybridParams& p, double L2) {
  return theorem1_bound_from_ratio(theorem1_ratio(p, L2), p.alpha);
}

struct NoiseBoundTerms {
  double psi1 = 0.0;
  double psi2 = 0.0;
  double denom1 = 0.0;  // lambda_min(Omega1) - L2 |Gamma1|
  double denom2 = 0.0;  // lambda_min(Omega2)
};

inline NoiseBoundTerms noise_bound_terms(const HybridParams& p, double L2, double eps) {
  const auto c = build_hybrid_matrices(p);
  const double a = p.alpha;
  const double g2 = norm2(c.Gamma2);
  const double d1 = p.k1 * std::pow(2.0, 0.5 * (1.0 - a)) * std::pow(eps, 0.5 * (a + 1.0)) + p.k2 * eps;
  // eps^0 at eps = 0 would be 1; the alpha = 0 sgn perturbation is bounded by 2.
  const double eps_alpha = eps == 0.0 ? 0.0 : std::pow(eps, a);
  const double d2 = p.k3 * std::pow(2.0, 1.0 - a) * eps_alpha + p.k4 * eps;
  NoiseBoundTerms t;
  t.psi1 = (2.0 * p.k3 + 0.5 * p.k1 * (a + 1.0) * g2) * d1;
  t.psi2 = (2.0 * p.k4 + p.k2 * g2) * d1 + (1.0 + g2) * d2;
  t.denom1 = lambda_min_sym(c.Omega1) - L2 * norm2(c.Gamma1);
  t.denom2 = lambda_min_sym(c.Omega2);
  return t;
}

/// Ultimate bound on |zeta|_2 under noise |delta| <= eps.
inline double noise_bound_theorem2(const HybridParams& p, double L2, double eps) {
  const NoiseBoundTerms t = noise_bound_terms(p, L2, eps);
  if (!(t.denom1 > 0.0))
    throw HypothesisViolated("lambda_min(Omega1) - L2*|Gamma1|_2 = " + std::to_string(t.denom1) +
                             " is not positive");
  if (!(t.denom2 > 0.0))
    throw HypothesisViolated("lambda_min(Omega2) = " + std::to_string(t.denom2) + " is not positive");
  return std::max(t.psi1 / t.denom1, t.psi2 / t.denom2);
}

struct LinearDecay {
  double lambda = 0.0;  // normalized decay rate
  double sigma1 = 1.0;  // transient amplification (grid estimate, lower bound of the sup)
  double tau = 1.0;
  Mat2 A{};             // error-system matrix
  std::array<double, 2> B{0.0, -1.0};

  /// Steady error bound tau * sigma1 * L2 / lambda.
  double steady_bound(double L2) const { return tau * sigma1 * L2 / lambda; }
};

/// Decay constants of the linear high-gain error system.
///
/// lambda and sigma1 are computed on the time-normalized matrix
/// tau*A in the scaled coordinates (e1, tau*e2), where both are independent
/// of tau; this keeps the steady bound exactly linear in tau.
inline LinearDecay linear_decay(const LinearParams& p) {
  LinearDecay d;
  d.tau = p.tau;
  d.A = {{{-p.a1 / p.tau, 1.0}, {-p.a2 / (p.tau * p.tau), 0.0}}};
  const Mat2 an{{{-p.a1, 1.0}, {-p.a2, 0.0}}};
  // eigenvalues of s^2 + a1 s + a2
  const double disc = p.a1 * p.a1 - 4.0 * p.a2;
  d.lambda = disc >= 0.0 ? 0.5 * (p.a1 - std::sqrt(disc)) : 0.5 * p.a1;

  constexpr int grid = 2000;
  constexpr double horizon = 20.0;
  double sigma = 1.0;
  for (int i = 0; i <= grid; ++i) {
    const double s = horizon * i / grid;
    const Mat2 as{{{an[0][0] * s, an[0][1] * s}, {an[1][0] * s, an[1][1] * s}}};
    sigma = std::max(sigma, spectral_norm(expm(as)) * std::exp(d.lambda * s));
  }
  d.sigma1 = sigma;
  return d;
}

/// c(p) = (2/pi) * integral_0^pi |sin th|^(p+1) d th, the first-harmonic gain
/// coefficient of |e|^p sgn(e): N(A) = c(p) A^(p-1).
inline double describing_gain(double pexp) {
  if (!(pexp >= 0.0)) throw std::invalid_argument("describing_gain: exponent must be >= 0");
  // By symmetry c = 4 * integral_0^1 s sin^(p+1)(pi s^2 / 2) ds after th = pi s^2 / 2,
  // which smooths the endpoint behaviour at th = 0.
  const double q = pexp + 1.0;
  auto f = [q](double s) { return s * std::pow(std::sin(0.5 * std::numbers::pi * s * s), q); };
  const auto& rule = gauss_legendre_64();
  return 4.0 * (integrate(rule, f, 0.0, 0.5) + integrate(rule, f, 0.5, 1.0));
}

struct LinearizationResult {
  double omega_n = 0.0;
  double zeta = 0.0;
  double amplitude = 0.0;
};

inline LinearizationResult linearize_levant(const LevantParams& p, double A) {
  if (!(A > 0.0)) throw std::invalid_argument("linearize_levant: amplitude must be > 0");
  const double omega = describing_gain(0.5);
  const double sq_pi = std::sqrt(std::numbers::pi);
  return {2.0 * std::sqrt(p.lambda1) / (sq_pi * std::sqrt(A)),
          p.lambda2 * omega * sq_pi / (4.0 * std::sqrt(p.lambda1)), A};
}

inline LinearizationResult linearize_linear(const LinearParams& p) {
  return {std::sqrt(p.a2) / p.tau, p.a1 / (2.0 * std::sqrt(p.a2)), 0.0};
}

inline LinearizationResult linearize_hybrid(const HybridParams& p, double A) {
  if (!(A > 0.0)) throw std::invalid_argument("linearize_hybrid: amplitude must be > 0");
  const double rho1 = describing_gain(0.5 * (p.alpha + 1.0));
  const double rho2 = describing_gain(p.alpha);
  const double stiffness = p.k3 * rho2 * std::pow(A, p.alpha - 1.0) + p.k4;
  const double damping = p.k1 * std::pow(A, 0.5 * (p.alpha - 1.0)) * rho1 + p.k2;
  return {std::sqrt(stiffness), damping / (2.0 * std::sqrt(stiffness)), A};
}

struct FreqResponse {
  double mag_track = 0.0;
  double mag_deriv = 0.0;
  double L_track_dB = 0.0;
  double L_deriv_dB = 0.0;
};

/// |X21/V| and |X22/V| of the linear high-gain differentiator at s = j omega.
inline FreqResponse linear_freq_response(const LinearParams& p, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("linear_freq_response: omega must be > 0");
  using C = std::complex<double>;
  const C s{0.0, omega};
  const double g1 = p.a1 / p.tau;
  const double g2 = p.a2 / (p.tau * p.tau);
  const C den = s * s + g1 * s + g2;
  FreqResponse r;
  r.mag_track = std::abs((g1 * s + g2) / den);
  r.mag_deriv = std::abs(g2 * s / den);
  r.L_track_dB = 20.0 * std::log10(r.mag_track);
  r.L_deriv_dB = 20.0 * std::log10(r.mag_deriv);
  return r;
}

}  // namespace hybdiff

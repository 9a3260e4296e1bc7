#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "hybdiff/linalg.hpp"
#include "hybdiff/quadrature.hpp"

using namespace hybdiff;
using Catch::Matchers::WithinAbs;

namespace {

template <std::size_t N>
Eigen::Matrix<double, N, N> to_eigen(const Mat<N>& m) {
  Eigen::Matrix<double, N, N> e;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) e(i, j) = m[i][j];
  return e;
}

template <std::size_t N>
Mat<N> random_symmetric(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat<N> m{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) m[i][j] = m[j][i] = u(rng);
  return m;
}

template <std::size_t N>
void check_against_eigen(std::mt19937_64& rng, double scale) {
  const Mat<N> m = random_symmetric<N>(rng, scale);
  const auto ours = sym_eigenvalues(m);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const double tol = 1e-9 * (1.0 + max_abs(m));
  for (std::size_t i = 0; i < N; ++i) CHECK_THAT(ours[i], WithinAbs(es.eigenvalues()(i), tol));
}

}  // namespace

TEST_CASE("eigenvalues of fixed matrices") {
  const Mat3 id{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  CHECK_THAT(lambda_min_sym(id), WithinAbs(1.0, 1e-15));
  const Mat3 d{{{3, 0, 0}, {0, -1, 0}, {0, 0, 2}}};
  CHECK(lambda_min_sym(d) == -1.0);
  CHECK(lambda_max_sym(d) == 3.0);
  const Mat2 m{{{2, 1}, {1, 2}}};
  CHECK_THAT(lambda_min_sym(m), WithinAbs(1.0, 1e-14));
  CHECK_THAT(lambda_max_sym(m), WithinAbs(3.0, 1e-14));
  const Mat<1> one{{{-4.5}}};
  CHECK(lambda_min_sym(one) == -4.5);
}

TEST_CASE("eigenvalues agree with an independent solver") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    check_against_eigen<2>(rng, 10.0);
    check_against_eigen<3>(rng, 10.0);
  }
  for (int i = 0; i < 200; ++i) check_against_eigen<3>(rng, 1e4);
}

TEST_CASE("near-degenerate spectra fall back cleanly") {
  const Mat3 almost{{{2.0, 1e-9, 0.0}, {1e-9, 2.0, 1e-9}, {0.0, 1e-9, 2.0}}};
  const auto ev = sym_eigenvalues(almost);
  for (double v : ev) CHECK_THAT(v, WithinAbs(2.0, 1e-8));
  const Mat3 twin{{{5, 0, 0}, {0, 1, 1e-12}, {0, 1e-12, 1}}};
  const auto tw = sym_eigenvalues(twin);
  CHECK_THAT(tw[0], WithinAbs(1.0, 1e-11));
  CHECK_THAT(tw[2], WithinAbs(5.0, 1e-11));
  const Mat2 flat{{{7, 0}, {0, 7}}};
  CHECK(sym_eigenvalues(flat) == std::array<double, 2>{7, 7});
}

TEST_CASE("asymmetric input is rejected") {
  const Mat3 m{{{1, 2, 0}, {0, 1, 0}, {0, 0, 1}}};
  CHECK_THROWS_AS(lambda_min_sym(m), AsymmetricInput);
  const Mat2 tiny{{{1, 1 + 1e-14}, {1, 1}}};
  CHECK_NOTHROW(lambda_min_sym(tiny));
}

TEST_CASE("matrix exponential and spectral norm") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const Mat2 a{{{u(rng), u(rng)}, {u(rng), u(rng)}}};
    Eigen::Matrix2d ea = to_eigen(a);
    // Exponential by eigen-decomposition of a generic real matrix
    Eigen::EigenSolver<Eigen::Matrix2d> es(ea);
    const Eigen::Matrix2cd V = es.eigenvectors();
    const Eigen::Vector2cd lam = es.eigenvalues();
    if (std::abs(lam(0) - lam(1)) < 1e-3) continue;
    const Eigen::Matrix2cd ex = V * lam.array().exp().matrix().asDiagonal() * V.inverse();
    const Mat2 ours = expm(a);
    const double scale = 1.0 + ex.cwiseAbs().maxCoeff();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) CHECK_THAT(ours[r][c], WithinAbs(ex(r, c).real(), 1e-9 * scale));
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(ea);
    CHECK_THAT(spectral_norm(a), WithinAbs(svd.singularValues()(0), 1e-10 * (1 + max_abs(a))));
  }
  const Mat2 zero{};
  CHECK(expm(zero) == Mat2{{{1, 0}, {0, 1}}});
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
    const auto rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK_THAT(wsum, WithinAbs(2.0, 1e-13));
    for (std::size_t deg = 0; deg < 2 * n; deg += 1) {
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1.0);
      const double got = integrate(rule, [deg](double x) { return std::pow(x, static_cast<double>(deg)); }, -1.0, 1.0);
      CHECK_THAT(got, WithinAbs(exact, 1e-13));
    }
  }
  CHECK_THAT(integrate(gauss_legendre_64(), [](double x) { return std::exp(x); }, 0.0, 1.0),
             WithinAbs(std::exp(1.0) - 1.0, 1e-14));
  CHECK_THROWS(gauss_legendre(0));
}

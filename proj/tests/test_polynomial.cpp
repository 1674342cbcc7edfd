#include "doctest.h"

#include <cmath>
#include <random>

#include "dcl/error.hpp"
#include "dcl/polynomial.hpp"
#include "dcl/sturm.hpp"

using namespace dcl;

TEST_CASE("evaluate uses increasing-degree coefficients") {
  const Polynomial p{1.0, -3.0, 2.0};  // 2s^2 - 3s + 1
  CHECK(evaluate(p, 0.0) == doctest::Approx(1.0));
  CHECK(evaluate(p, 1.0) == doctest::Approx(0.0));
  CHECK(evaluate(p, 2.0) == doctest::Approx(3.0));
  const Complex z = evaluate(p, Complex(0.0, 1.0));
  CHECK(z.real() == doctest::Approx(-1.0));
  CHECK(z.imag() == doctest::Approx(-3.0));
}

TEST_CASE("chebyshev interpolation reproduces polynomials of the same degree") {
  const Polynomial truth{0.5, -1.0, 0.0, 2.0, -0.25};
  const auto fitted = chebyshev_interpolate([&](double s) { return evaluate(truth, s); }, 4, 2.0);
  REQUIRE(fitted.size() == truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) CHECK(fitted[i] == doctest::Approx(truth[i]).epsilon(1e-12));
}

TEST_CASE("trim drops negligible leading coefficients") {
  const auto p = trim({1.0, 2.0, 1e-12, 1e-14}, 1e-8);
  CHECK(p.size() == 2);
}

TEST_CASE("roots of a product of linear factors") {
  const Polynomial p{-6.0, 11.0, -6.0, 1.0};  // (s-1)(s-2)(s-3)
  const auto rr = real_roots(p);
  REQUIRE(rr.size() == 3);
  CHECK(rr[0].value == doctest::Approx(1.0));
  CHECK(rr[1].value == doctest::Approx(2.0));
  CHECK(rr[2].value == doctest::Approx(3.0));
}

TEST_CASE("complex roots are not reported as real") {
  const Polynomial p{1.0, 0.0, 1.0};  // s^2 + 1
  CHECK(real_roots(p).empty());
  CHECK(roots(p).size() == 2);
}

TEST_CASE("double roots are merged with multiplicity two") {
  const Polynomial p{1.0, -2.0, 1.0};  // (s-1)^2
  const auto rr = real_roots(p);
  REQUIRE(rr.size() == 1);
  CHECK(rr[0].value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rr[0].multiplicity == 2);
}

TEST_CASE("sturm count on a hand-checked tridiagonal") {
  const double diag[] = {1.0, -2.0, 3.0};
  const double off[] = {1.0, 1.0};
  Matrix t = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) t(i, i) = diag[i];
  t(0, 1) = t(1, 0) = t(1, 2) = t(2, 1) = 1.0;
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(t).eigenvalues();
  int negative = 0;
  for (int i = 0; i < 3; ++i) negative += ev[i] < 0.0;
  CHECK(sturm_negative_count(diag, off) == negative);
}

TEST_CASE("sturm count agrees with dense eigenvalues on random tridiagonals") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> size(1, 30);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
    for (auto& d : diag) d = u(rng);
    for (auto& o : off) {
      do o = u(rng);
      while (std::abs(o) < 1e-3);
    }
    Matrix t = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) t(i, i) = diag[i];
    for (int i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = off[i];
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(t).eigenvalues();
    int negative = 0;
    for (int i = 0; i < n; ++i) negative += ev[i] < 0.0;
    CAPTURE(trial);
    CHECK(sturm_negative_count(diag, off) == negative);
  }
}

TEST_CASE("sturm errors") {
  const double diag[] = {1.0, 2.0};
  const double zero[] = {0.0};
  const double two[] = {1.0, 1.0};
  CHECK_THROWS_AS(sturm_negative_count(diag, zero), Error);
  CHECK_THROWS_AS(sturm_negative_count(diag, two), Error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "sandwich/linalg.hpp"

using namespace sandwich::linalg;

namespace {

// Independent series oracle: scale until ||M|| <= 1/4, sum Taylor terms to
// machine exhaustion, square back up.
Matrix taylor_exp(const Matrix& m) {
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::pow(2.0, s) > 0.25) ++s;
  const Matrix a = m / std::pow(2.0, s);
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  Matrix sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
    if (term.norm() < 1e-20 * sum.norm()) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

Matrix random_matrix(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("mat_exp: zero matrix gives identity") {
  const Matrix z = Matrix::Zero(2, 2);
  CHECK((mat_exp(z) - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("mat_exp: nilpotent series truncates") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  Matrix expect(2, 2);
  expect << 1, 1, 0, 1;
  CHECK((mat_exp(m) - expect).norm() <= 1e-15);
}

TEST_CASE("mat_exp: estimator companion block vs series oracle") {
  // block [0, A_z/q; I, 0] with A_z = [0,1;1,1], q = 1
  Matrix f(4, 4);
  f << 0, 0, 0, 1,
       0, 0, 1, 1,
       1, 0, 0, 0,
       0, 1, 0, 0;
  const Matrix got = mat_exp(f);
  const Matrix want = taylor_exp(f);
  CHECK((got - want).norm() <= 1e-13 * want.norm());
}

TEST_CASE("mat_exp: inverse and semigroup identities (random battery)") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const Matrix m = random_matrix(rng, n, 2.0);
    const Matrix e = mat_exp(m);
    const Matrix einv = mat_exp(Matrix(-m));
    CHECK((e * einv - Matrix::Identity(n, n)).norm() <= 1e-10);

    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const double s = dist(rng), t = dist(rng);
    const Matrix lhs = mat_exp(Matrix((s + t) * m));
    const Matrix rhs = mat_exp(Matrix(s * m)) * mat_exp(Matrix(t * m));
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("mat_exp: larger norms against the series oracle") {
  std::mt19937 rng(777);
  for (double scale : {5.0, 12.0}) {
    const Matrix m = random_matrix(rng, 4, scale);
    const Matrix got = mat_exp(m);
    const Matrix want = taylor_exp(m);
    CHECK((got - want).norm() <= 1e-12 * want.norm());
  }
}

TEST_CASE("mat_exp: rejects non-square input") {
  CHECK_THROWS_AS(mat_exp(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("solve_lyapunov: -I with Q = 2I gives identity") {
  const Matrix a = -Matrix::Identity(2, 2);
  const Matrix q = 2.0 * Matrix::Identity(2, 2);
  CHECK((solve_lyapunov(a, q) - Matrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("solve_lyapunov: scalar case") {
  Matrix a(1, 1), q(1, 1);
  a << -2.0;
  q << 4.0;
  CHECK(solve_lyapunov(a, q)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_lyapunov: closed-loop plant matrix") {
  Matrix a(2, 2);
  a << 1, 1, -9, -4.5;  // A + B K for A=[1,1;1,0.5], B=[0,1]^T, K=[-10,-5]
  const Matrix q = Matrix::Identity(2, 2);
  const Matrix p = solve_lyapunov(a, q);
  CHECK((p * a + a.transpose() * p + q).norm() <= 1e-10 * q.norm());
  CHECK((p - p.transpose()).norm() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("solve_lyapunov: random Hurwitz battery stays symmetric PD") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    Matrix a = random_matrix(rng, n, 1.0);
    a -= (spectral_abscissa(a) + 0.5) * Matrix::Identity(n, n);
    Matrix base = random_matrix(rng, n, 1.0);
    const Matrix q = base * base.transpose() + Matrix::Identity(n, n);
    const Matrix p = solve_lyapunov(a, q);
    CHECK((p - p.transpose()).norm() <= 1e-12 * std::max(1.0, p.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(p);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("solve_lyapunov: rejects non-Hurwitz input") {
  Matrix a(2, 2);
  a << 1, 1, 1, 0.5;
  CHECK_THROWS(solve_lyapunov(a, Matrix::Identity(2, 2)));
}

TEST_CASE("is_hurwitz: saddle plant matrix is unstable") {
  Matrix a(2, 2);
  a << 1, 1, 1, 0.5;  // det = -0.5 < 0
  CHECK_FALSE(is_hurwitz(a));
}

TEST_CASE("is_hurwitz: closed-loop matrix is stable") {
  Matrix a(2, 2);
  a << 1, 1, -9, -4.5;  // trace -3.5, det 4.5
  CHECK(is_hurwitz(a));
}

TEST_CASE("is_hurwitz: zero matrix is not strictly stable") {
  CHECK_FALSE(is_hurwitz(Matrix::Zero(3, 3)));
}

TEST_CASE("has_eigenvalue_minus_ksq_pisq") {
  Matrix az(2, 2);
  az << 0, 1, 1, 1;  // eigenvalues (1 +- sqrt 5)/2
  CHECK_FALSE(has_eigenvalue_minus_ksq_pisq(az, 5));

  const double pi = std::numbers::pi;
  Matrix d = Matrix::Identity(2, 2) * (-pi * pi);
  CHECK(has_eigenvalue_minus_ksq_pisq(d, 1));
  CHECK_FALSE(has_eigenvalue_minus_ksq_pisq(Matrix::Identity(2, 2), 5));
  CHECK(has_eigenvalue_minus_ksq_pisq(Matrix::Zero(2, 2), 0));  // k = 0
}

TEST_CASE("place_poles: double integrator") {
  Matrix a(2, 2);
  a << 0, 1, 0, 0;
  Vector b(2);
  b << 0, 1;
  const RowVector k = place_poles(a, b, {{-1.0, 0.0}, {-1.0, 0.0}});
  CHECK(k(0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(k(1) == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("place_poles: already-placed system needs zero gain") {
  const Matrix a = -Matrix::Identity(2, 2);
  Vector b(2);
  b << 0, 1;
  const RowVector k = place_poles(a, b, {{-1.0, 0.0}, {-1.0, 0.0}});
  CHECK(k.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("place_poles: recovers the reference gain from its own poles") {
  Matrix a(2, 2);
  a << 1, 1, 1, 0.5;
  Vector b(2);
  b << 0, 1;
  Matrix acl(2, 2);
  acl << 1, 1, -9, -4.5;
  const auto poles = eigenvalues(acl);
  const RowVector k = place_poles(a, b, poles);
  CHECK(k(0) == doctest::Approx(-10.0).epsilon(1e-8));
  CHECK(k(1) == doctest::Approx(-5.0).epsilon(1e-8));
  CHECK(std::abs(spectral_abscissa(a + b * k) - spectral_abscissa(acl)) <= 1e-8);
}

TEST_CASE("place_poles then is_hurwitz agree for stable pole sets") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(0.2, 3.0);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    // controllable-by-construction companion pair
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) a(n - 1, j) = dist(rng) - 1.5;
    Vector b = Vector::Zero(n);
    b(n - 1) = 1.0;
    std::vector<std::complex<double>> poles;
    for (int i = 0; i < n; ++i) poles.emplace_back(-dist(rng), 0.0);
    const RowVector k = place_poles(a, b, poles);
    CHECK(is_hurwitz(a + b * k));
  }
}

TEST_CASE("place_poles: rejects uncontrollable pairs") {
  const Matrix a = Matrix::Identity(2, 2);
  Vector b(2);
  b << 0, 1;  // second state controllable only
  CHECK_THROWS(place_poles(a, b, {{-1.0, 0.0}, {-2.0, 0.0}}));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sandwich/kernels.hpp"
#include "sandwich/linalg.hpp"
#include "sandwich/quadrature.hpp"
#include "sandwich/scenario.hpp"

using namespace sandwich;
using std::numbers::pi;

namespace {

PlantConfig reference_plant() { return ScenarioFile::baseline().plant; }

Eigen::RowVectorXd reference_K() { return ScenarioFile::baseline().gains.K; }

KernelSet reference_kernels() {
  return KernelSet::build(reference_plant(), reference_K());
}

}  // namespace

TEST_CASE("block matrices: hand-checked scalar case") {
  // n = m = 1, A = a, abar = [a1], q = 1
  PlantConfig p;
  p.A.resize(1, 1);
  p.A << -1.0;
  p.B.resize(1);
  p.B << 2.0;
  p.CX.resize(1);
  p.CX << 0.5;
  p.q = 1.0;
  p.abar = {-1.0};
  Eigen::RowVectorXd K(1);
  K << 0.0;
  const auto kb = build_block_matrices(p, K);
  Eigen::MatrixXd d_expect(2, 2), e_expect(2, 2), f_expect(2, 2);
  d_expect << 0.0, -1.0, 1.0, -1.0;  // [0, A; I, -B C_X]
  e_expect << 0.0, -1.0, 1.0, 0.0;   // [0, A + BK; I, 0]
  f_expect << 0.0, -1.0, 1.0, 0.0;   // [0, A_z/q; I, 0]
  CHECK((kb.D - d_expect).norm() == 0.0);
  CHECK((kb.E - e_expect).norm() == 0.0);
  CHECK((kb.F - f_expect).norm() == 0.0);
  CHECK(kb.G.rows() == 1);
  CHECK(kb.G1.rows() == 1);
}

TEST_CASE("block matrices: perturbation terms vanish for K = 0, C_X = 0") {
  PlantConfig p = reference_plant();
  p.CX.setZero();
  Eigen::RowVectorXd K = Eigen::RowVectorXd::Zero(2);
  const auto kb = build_block_matrices(p, K);
  CHECK((kb.D - kb.E).norm() == 0.0);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 4);
  expect.block(0, 2, 2, 2) = p.A;
  expect.block(2, 0, 2, 2) = Eigen::MatrixXd::Identity(2, 2);
  CHECK((kb.D - expect).norm() == 0.0);
}

TEST_CASE("block matrices: reference G is nonsingular") {
  const auto kb = build_block_matrices(reference_plant(), reference_K());
  CHECK(std::abs(kb.G.determinant()) > 1e-6);
  CHECK(std::abs(kb.G1.determinant()) > 1e-6);
}

TEST_CASE("Phi(0) equals C_X exactly") {
  const auto ks = reference_kernels();
  CHECK((ks.Phi(0, 0.0) - reference_plant().CX).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero C_X and K give identically zero forward kernels") {
  PlantConfig p = reference_plant();
  p.CX.setZero();
  const auto ks = KernelSet::build(p, Eigen::RowVectorXd::Zero(2));
  for (double x : {0.0, 0.3, 1.0}) {
    CHECK(ks.Phi(0, x).cwiseAbs().maxCoeff() == 0.0);
    for (double y : {0.0, 0.5 * x, x}) {
      CHECK(ks.phi(0, 0, x, y) == 0.0);
      CHECK(ks.psi(0, 0, x, y) == 0.0);
    }
    CHECK(ks.Gamma(0, x).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("analytic y-derivative matches central differencing") {
  const auto ks = reference_kernels();
  const double h = 1e-5;
  const double ana = ks.phi(0, 1, 1.0, 0.5);
  const double fdv = (ks.phi(0, 0, 1.0, 0.5 + h) - ks.phi(0, 0, 1.0, 0.5 - h)) / (2.0 * h);
  CHECK(std::abs(ana - fdv) <= 1e-8 * std::max(1.0, std::abs(ana)));
}

TEST_CASE("derivative chain consistent for orders 1..4") {
  const auto ks = reference_kernels();
  const double h = 1e-5;
  for (int k = 1; k <= 4; ++k) {
    for (double x : {0.35, 0.8}) {
      const double y = 0.4 * x;
      const double ana_x = ks.phi(k, 0, x, y);
      const double fd_x = (ks.phi(k - 1, 0, x + h, y) - ks.phi(k - 1, 0, x - h, y)) / (2.0 * h);
      CHECK(std::abs(ana_x - fd_x) <= 1e-7 * std::max(1.0, std::abs(ana_x)));

      const double ana_y = ks.psi(0, k, x, y);
      const double fd_y = (ks.psi(0, k - 1, x, y + h) - ks.psi(0, k - 1, x, y - h)) / (2.0 * h);
      CHECK(std::abs(ana_y - fd_y) <= 1e-7 * std::max(1.0, std::abs(ana_y)));

      const Eigen::RowVectorXd ana_p = ks.Phi(k, x);
      const Eigen::RowVectorXd fd_p = (ks.Phi(k - 1, x + h) - ks.Phi(k - 1, x - h)) / (2.0 * h);
      CHECK((ana_p - fd_p).cwiseAbs().maxCoeff() <=
            1e-7 * std::max(1.0, ana_p.cwiseAbs().maxCoeff()));

      const Eigen::RowVectorXd ana_t = ks.theta(k, x);
      const Eigen::RowVectorXd fd_t = (ks.theta(k - 1, x + h) - ks.theta(k - 1, x - h)) / (2.0 * h);
      CHECK((ana_t - fd_t).cwiseAbs().maxCoeff() <=
            1e-7 * std::max(1.0, ana_t.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("derivative order cap enforced") {
  const auto ks = reference_kernels();
  CHECK_THROWS_AS(ks.phi(4, 2, 0.5, 0.2), std::invalid_argument);  // 6 > 2m+1 = 5
  CHECK_THROWS_AS(ks.Phi(6, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ks.phi(0, 0, 0.2, 0.5), std::domain_error);  // y > x
}

TEST_CASE("estimator kernel boundary values") {
  const auto ks = reference_kernels();
  const auto p = reference_plant();
  CHECK(ks.vartheta(0, 0.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ks.vartheta(0, 1.0) + p.Cz()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((ks.theta(0, 0.0) + p.CX).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ks.theta(0, 1.0).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("estimator kernels solve their boundary-value ODEs") {
  const auto ks = reference_kernels();
  const auto p = reference_plant();
  const Eigen::MatrixXd az = p.Az();
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    worst = std::max(worst, (p.q * ks.vartheta(2, x) - ks.vartheta(0, x) * az)
                                .cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (p.q * ks.theta(2, x) - ks.theta(0, x) * p.A).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("estimator kernel ODEs: Richardson second-difference oracle") {
  const auto ks = reference_kernels();
  const auto p = reference_plant();
  const Eigen::MatrixXd az = p.Az();
  const double h = 1e-3;
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    for (int c = 0; c < p.m(); ++c) {
      const auto f = [&](double xx) { return ks.vartheta(0, xx)(c); };
      const auto d2 = [&](double step) {
        return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
      };
      const double num2 = (4.0 * d2(h) - d2(2.0 * h)) / 3.0;
      const double resid = p.q * num2 - ks.vartheta(0, x) * az.col(c);
      worst = std::max(worst, std::abs(resid));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("inverse-pair sign resolves to -1 and Gamma(0) = -C_X") {
  const auto ks = reference_kernels();
  CHECK(ks.gamma_sign() == -1);
  CHECK((ks.Gamma(0, 0.0) + reference_plant().CX).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ks.Gamma(1, 0.0) + reference_K()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("transform round-trip on a smooth battery (201 points)") {
  const auto ks = reference_kernels();
  const int N = 200;
  std::vector<std::vector<double>> profiles;
  for (int k = 1; k <= 5; ++k) {
    std::vector<double> u(N + 1);
    for (int i = 0; i <= N; ++i) u[i] = std::sin(k * pi * i / static_cast<double>(N));
    profiles.push_back(u);
  }
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Eigen::VectorXd> states;
  for (int s = 0; s < 4; ++s) {
    Eigen::VectorXd x(2);
    x << dist(rng), dist(rng);
    states.push_back(x);
  }
  CHECK(ks.roundtrip_max_error(profiles, states, N) <= 1e-6);

  // inverse-then-forward as well
  std::vector<double> w0(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double x = i / static_cast<double>(N);
    w0[i] = std::sin(2.0 * pi * x) + 0.25 * x * x * (1.0 - x);
  }
  const auto u = ks.inverse_transform(w0, states[0]);
  const auto w1 = ks.forward_transform(u, states[0]);
  double err = 0.0;
  for (int i = 0; i <= N; ++i) err = std::max(err, std::abs(w1[i] - w0[i]));
  CHECK(err <= 1e-6);
}

TEST_CASE("kernel pair satisfies the composition identity") {
  // psi(x,y) + phi(x,y) = int_y^x psi(x,z) phi(z,y) dz  pointwise
  const auto ks = reference_kernels();
  for (double x : {0.4, 1.0}) {
    for (double frac : {0.0, 0.35, 0.8}) {
      const double y = frac * x;
      const int M = 200;
      const double h = (x - y) / M;
      std::vector<double> f(M + 1);
      for (int i = 0; i <= M; ++i) {
        const double z = y + i * h;
        f[i] = ks.psi(0, 0, x, z) * ks.phi(0, 0, z, y);
      }
      const double integral = quad::integrate_prefix(f, M, h);
      CHECK(std::abs(ks.psi(0, 0, x, y) + ks.phi(0, 0, x, y) - integral) <= 1e-9);
    }
  }
}

TEST_CASE("general diffusivity keeps all kernel certificates") {
  PlantConfig p = reference_plant();
  p.q = 2.5;
  // CFL guard not relevant here; kernels only
  const auto ks = KernelSet::build(p, reference_K());
  CHECK((ks.Phi(0, 0.0) - p.CX).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ks.gamma_sign() == -1);
  // round trip
  const int N = 200;
  std::vector<std::vector<double>> profiles;
  std::vector<double> u(N + 1);
  for (int i = 0; i <= N; ++i) u[i] = std::sin(pi * i / static_cast<double>(N));
  profiles.push_back(u);
  std::vector<Eigen::VectorXd> states{Eigen::VectorXd::Ones(2)};
  CHECK(ks.roundtrip_max_error(profiles, states, N) <= 1e-6);
  // estimator BVPs carry the q explicitly
  const Eigen::MatrixXd az = p.Az();
  double worst = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double x = i / 50.0;
    worst = std::max(worst, (p.q * ks.vartheta(2, x) - ks.vartheta(0, x) * az)
                                .cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("singular boundary-value block is rejected") {
  // A_z = -pi^2 makes G singular (eigenvalue -k^2 pi^2 with k = 1)
  PlantConfig p;
  p.A.resize(1, 1);
  p.A << 1.0;
  p.B.resize(1);
  p.B << 1.0;
  p.CX.resize(1);
  p.CX << 1.0;
  p.q = 1.0;
  p.abar = {-pi * pi};
  Eigen::RowVectorXd K(1);
  K << -2.0;
  CHECK_THROWS(KernelSet::build(p, K));
}

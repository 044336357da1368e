#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sandwich/linalg.hpp"
#include "sandwich/operators.hpp"
#include "sandwich/quadrature.hpp"
#include "sandwich/scenario.hpp"
#include "sandwich/stencils.hpp"

using namespace sandwich;
using std::numbers::pi;

namespace {

PlantConfig reference_plant() { return ScenarioFile::baseline().plant; }

KernelSet reference_kernels() {
  const auto sc = ScenarioFile::baseline();
  return KernelSet::build(sc.plant, sc.gains.K);
}

PlantConfig first_order_chain_plant() {
  PlantConfig p = reference_plant();
  p.abar = {1.0};  // m = 1
  return p;
}

}  // namespace

TEST_CASE("chi table: first rows match the hand-derived traces") {
  const auto chi = ChiTable::build(3);
  CHECK(chi.coefficients(1, 0) == std::vector<double>{1.0});
  CHECK(chi.coefficients(2, 0) == std::vector<double>{1.0});
  // chi_{2,1} = d_y psi + 2 d_x psi on the diagonal
  CHECK(chi.coefficients(2, 1) == std::vector<double>{1.0, 2.0});
  CHECK(chi.coefficients(3, 0) == std::vector<double>{1.0});
  // chi_{3,1} = 2 d_y + 3 d_x
  CHECK(chi.coefficients(3, 1) == std::vector<double>{2.0, 3.0});
  // chi_{3,2} = d_y^2 + 3 d_x d_y + 3 d_x^2
  CHECK(chi.coefficients(3, 2) == std::vector<double>{1.0, 3.0, 3.0});
}

TEST_CASE("chi table: zero kernel gives zero rows") {
  PlantConfig p = reference_plant();
  p.CX.setZero();
  const auto ks = KernelSet::build(p, Eigen::RowVectorXd::Zero(2));
  const auto chi = build_chi_table(ks, p.m());
  const auto diag = psi_diagonal(ks);
  for (int k = 1; k <= chi.k_max(); ++k) {
    for (int j = 0; j < k; ++j) {
      CHECK(chi.eval(diag, k, j, 0.6) == 0.0);
    }
  }
}

TEST_CASE("chi table matches numeric differentiation of the Volterra term") {
  const auto ks = reference_kernels();
  const auto chi = build_chi_table(ks, 2);
  const auto f = [](double y) { return std::sin(pi * y) + 0.5 * y * y; };
  const auto df = [](int d, double x) -> double {
    switch (d) {
      case 0: return std::sin(pi * x) + 0.5 * x * x;
      case 1: return pi * std::cos(pi * x) + x;
      case 2: return -pi * pi * std::sin(pi * x) + 1.0;
      default: return -pi * pi * pi * std::cos(pi * x);
    }
  };
  const auto volterra = [&](double x) {
    const int M = 600;
    std::vector<double> g(M + 1);
    for (int i = 0; i <= M; ++i) {
      g[i] = ks.psi(0, 0, x, x * i / M) * f(x * i / M);
    }
    return quad::integrate_prefix(g, M, x / M);
  };
  const auto psi_diag = psi_diagonal(ks);
  for (int k = 1; k <= 3; ++k) {
    for (double x : {0.45, 0.85}) {
      const double h = (k <= 2) ? 1e-3 : 4e-3;
      std::vector<double> nodes(9), vals(9);
      for (int i = -4; i <= 4; ++i) {
        nodes[i + 4] = i * h;
        vals[i + 4] = volterra(x + i * h);
      }
      const auto w = fd::fornberg_weights(0.0, nodes, k);
      double numeric = 0.0;
      for (int i = 0; i < 9; ++i) numeric += w[i] * vals[i];

      const int M = 600;
      std::vector<double> g(M + 1);
      for (int i = 0; i <= M; ++i) {
        g[i] = ks.psi(k, 0, x, x * i / M) * f(x * i / M);
      }
      double analytic = quad::integrate_prefix(g, M, x / M);
      for (int j = 0; j < k; ++j) {
        analytic += chi.eval(psi_diag, k, j, x) * df(k - j - 1, x);
      }
      CHECK(std::abs(numeric - analytic) <= 1e-6);
    }
  }
}

TEST_CASE("virtual controls: m = 2 closed form") {
  const auto ab = build_alpha_beta({3.0, 3.0}, 2);
  CHECK(ab.alpha == std::vector<double>{1.0, 3.0});
  CHECK(ab.beta == std::vector<double>{3.0, 1.0});
  // alpha + c_2 beta = (10, 6)
  CHECK(ab.alpha[0] + 3.0 * ab.beta[0] == 10.0);
  CHECK(ab.alpha[1] + 3.0 * ab.beta[1] == 6.0);
}

TEST_CASE("virtual controls: m = 1 degenerate convention") {
  const auto ab = build_alpha_beta({2.5}, 1);
  CHECK(ab.alpha == std::vector<double>{0.0});
  CHECK(ab.beta == std::vector<double>{1.0});
}

TEST_CASE("virtual controls: m = 3 hand expansion") {
  const auto ab = build_alpha_beta({1.0, 1.0, 1.0}, 3);
  // Step-by-step expansion with unit gains (w stands for w(1,t)):
  //   tau_1 = w, y_2 = w' + w, tau_2 = tau_1' + y_1 + y_2 = 2w' + 2w,
  //   y_3 = w'' + tau_2 = w'' + 2w' + 2w,
  //   alpha = y_2 + tau_2' = (1, 3, 2), beta = y_3 = (2, 2, 1)
  CHECK(ab.alpha == std::vector<double>{1.0, 3.0, 2.0});
  CHECK(ab.beta == std::vector<double>{2.0, 2.0, 1.0});
}

TEST_CASE("virtual controls: chain polynomial equals the tridiagonal spectrum") {
  // The closed chain y' = M y with M tridiagonal [-c_k on the diagonal,
  // +1 above, -1 below] has characteristic polynomial
  // s^m + sum_i (alpha_i + c_m beta_i) s^i.
  for (const auto& c : std::vector<std::vector<double>>{
           {3.0, 3.0}, {1.0, 2.0, 3.0}, {0.5, 1.5, 2.5, 3.5}}) {
    const int m = static_cast<int>(c.size());
    const auto ab = build_alpha_beta(c, m);
    Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      chain(i, i) = -c[i];
      if (i + 1 < m) chain(i, i + 1) = 1.0;
      if (i > 0) chain(i, i - 1) = -1.0;
    }
    // companion matrix of the reported polynomial
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) comp(i, i + 1) = 1.0;
    for (int i = 0; i < m; ++i) {
      comp(m - 1, i) = -(ab.alpha[i] + c.back() * ab.beta[i]);
    }
    const auto ev_chain = linalg::eigenvalues(chain);
    auto ev_comp = linalg::eigenvalues(comp);
    for (const auto& ev : ev_chain) {
      auto best = std::min_element(ev_comp.begin(), ev_comp.end(),
                                   [&](auto a, auto b) {
                                     return std::abs(a - ev) < std::abs(b - ev);
                                   });
      REQUIRE(best != ev_comp.end());
      CHECK(std::abs(*best - ev) <= 1e-9);
      ev_comp.erase(best);
    }
  }
}

TEST_CASE("boundary operators: zero kernels collapse to the raw chain") {
  PlantConfig p = reference_plant();
  p.CX.setZero();
  const auto ks = KernelSet::build(p, Eigen::RowVectorXd::Zero(2));
  const auto chi = build_chi_table(ks, p.m());
  const auto ops = assemble_boundary_operators(ks, chi, 20);
  // B reduces to abar_1 + abar_2 q d^2; C, D, E vanish
  CHECK(ops.B.deriv_coeffs[0] == doctest::Approx(1.0));
  CHECK(ops.B.deriv_coeffs[1] == 0.0);
  CHECK(ops.B.deriv_coeffs[2] == doctest::Approx(1.0));
  CHECK(ops.B.deriv_coeffs[3] == 0.0);
  for (double c : ops.C.deriv_coeffs) CHECK(c == 0.0);
  for (double d : ops.D.integral_kernel) CHECK(d == 0.0);
  CHECK(ops.E.state_gain.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary operators: m = 1 hand expansion") {
  const PlantConfig p = first_order_chain_plant();
  Eigen::RowVectorXd K(2);
  K << -10.0, -5.0;
  const auto ks = KernelSet::build(p, K);
  const auto chi = build_chi_table(ks, 1);
  const int N = 20;
  const auto ops = assemble_boundary_operators(ks, chi, N);
  const double q = p.q;
  const double a1 = p.abar[0];

  const double phi11 = ks.phi(0, 0, 1.0, 1.0);
  const double phiy11 = ks.phi(0, 1, 1.0, 1.0);
  const double phi10 = ks.phi(0, 0, 1.0, 0.0);
  const double phiy10 = ks.phi(0, 1, 1.0, 0.0);
  const double psi11 = ks.psi(0, 0, 1.0, 1.0);
  const double psi00 = ks.psi(0, 0, 0.0, 0.0);
  const Eigen::RowVectorXd Phi1 = ks.Phi(0, 1.0);
  const double phi1B = Phi1 * p.B;

  // B = a1 - q phi(1,1) d + q phi_y(1,1) + q phi(1,1) psi(1,1)
  CHECK(ops.B.deriv_coeffs[0] ==
        doctest::Approx(a1 + q * phiy11 + q * phi11 * psi11).epsilon(1e-10));
  CHECK(ops.B.deriv_coeffs[1] == doctest::Approx(-q * phi11).epsilon(1e-10));

  // C: [q phi(1,0) - Phi(1)B] d + [-q phi_y(1,0) - q phi(1,0) psi(0,0)
  //     + Phi(1)B psi(0,0)]
  CHECK(ops.C.deriv_coeffs[1] == doctest::Approx(q * phi10 - phi1B).epsilon(1e-10));
  CHECK(ops.C.deriv_coeffs[0] ==
        doctest::Approx(-q * phiy10 - q * phi10 * psi00 + phi1B * psi00)
            .epsilon(1e-10));

  // E row, integral part with the same Simpson rule
  const double h = 1.0 / N;
  Eigen::RowVectorXd e_expect = Eigen::RowVectorXd::Zero(2);
  e_expect += -q * phi10 * ks.Gamma(1, 0.0) + q * phiy10 * ks.Gamma(0, 0.0);
  e_expect += -Phi1 * p.A + phi1B * ks.Gamma(1, 0.0);
  e_expect += q * phi11 * ks.Gamma(1, 1.0) - q * phiy11 * ks.Gamma(0, 1.0);
  e_expect += -a1 * ks.Gamma(0, 1.0);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> f(N + 1);
    for (int j = 0; j <= N; ++j) {
      f[j] = ks.phi(0, 2, 1.0, j * h) * ks.Gamma(0, j * h)(c);
    }
    e_expect(c) += q * quad::simpson(f, h);
  }
  CHECK((ops.E.state_gain - e_expect).cwiseAbs().maxCoeff() <= 1e-10);

  // D(y) at the grid points
  for (int j = 0; j <= N; ++j) {
    const double y = j * h;
    double expect = a1 * ks.psi(0, 0, 1.0, y) - q * phi11 * ks.psi(1, 0, 1.0, y) +
                    q * phiy11 * ks.psi(0, 0, 1.0, y) + q * ks.phi(0, 2, 1.0, y);
    const int tail = N - j;
    if (tail >= 1) {
      std::vector<double> f(tail + 1);
      for (int t = 0; t <= tail; ++t) {
        f[t] = ks.phi(0, 2, 1.0, (j + t) * h) * ks.psi(0, 0, (j + t) * h, y);
      }
      expect -= q * quad::integrate_prefix(f, tail, h);
    }
    CHECK(ops.D.integral_kernel[j] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("feedback operator: m = 2 reference gains") {
  const auto sc = ScenarioFile::baseline();
  const auto ks = KernelSet::build(sc.plant, sc.gains.K);
  const auto chi = build_chi_table(ks, 2);
  const auto ops = assemble_boundary_operators(ks, chi, sc.grid.N);
  const auto ab = build_alpha_beta(sc.gains.c, 2);
  const auto L = assemble_L(ops.B, ab, sc.plant.q);
  // L = -B - 10 d^0 - 6 d^2 (q = 1)
  CHECK(L.deriv_coeffs[0] == doctest::Approx(-ops.B.deriv_coeffs[0] - 10.0));
  CHECK(L.deriv_coeffs[1] == doctest::Approx(-ops.B.deriv_coeffs[1]));
  CHECK(L.deriv_coeffs[2] == doctest::Approx(-ops.B.deriv_coeffs[2] - 6.0));
  CHECK(L.deriv_coeffs[3] == doctest::Approx(-ops.B.deriv_coeffs[3]));
}

TEST_CASE("feedback operator: m = 1 convention and zero collapse") {
  const PlantConfig p = first_order_chain_plant();
  Eigen::RowVectorXd K(2);
  K << -10.0, -5.0;
  const auto ks = KernelSet::build(p, K);
  const auto chi = build_chi_table(ks, 1);
  const auto ops = assemble_boundary_operators(ks, chi, 20);
  const auto ab = build_alpha_beta({2.0}, 1);
  const auto L = assemble_L(ops.B, ab, p.q);
  CHECK(L.deriv_coeffs[0] == doctest::Approx(-ops.B.deriv_coeffs[0] - 2.0));
  CHECK(L.deriv_coeffs[1] == doctest::Approx(-ops.B.deriv_coeffs[1]));

  BoundaryOperator zero_b;
  zero_b.deriv_coeffs.assign(2, 0.0);
  AlphaBeta zero_ab;
  zero_ab.m = 1;
  zero_ab.c = {0.0};
  zero_ab.alpha = {0.0};
  zero_ab.beta = {0.0};
  const auto L0 = assemble_L(zero_b, zero_ab, 1.0);
  CHECK(L0.deriv_coeffs[0] == 0.0);
  CHECK(L0.deriv_coeffs[1] == 0.0);
}

TEST_CASE("left-trace operator: zero kernel and order-0 C give zero") {
  PlantConfig p = reference_plant();
  p.CX.setZero();
  const auto ks0 = KernelSet::build(p, Eigen::RowVectorXd::Zero(2));
  const auto chi0 = build_chi_table(ks0, 2);
  BoundaryOperator c_op;
  c_op.deriv_coeffs = {1.0, 2.0, 3.0, 4.0};
  const auto f0 = assemble_Fbar(ks0, c_op, chi0, 2);
  for (double v : f0.deriv_coeffs) CHECK(v == 0.0);

  const auto ks = reference_kernels();
  const auto chi = build_chi_table(ks, 2);
  BoundaryOperator order0;
  order0.deriv_coeffs = {5.0, 0.0, 0.0, 0.0};
  const auto f1 = assemble_Fbar(ks, order0, chi, 2);
  for (double v : f1.deriv_coeffs) CHECK(v == 0.0);
}

TEST_CASE("left-trace operator matches the x -> 0 extrapolated oracle") {
  const auto sc = ScenarioFile::baseline();
  const auto ks = KernelSet::build(sc.plant, sc.gains.K);
  const auto chi = build_chi_table(ks, 2);
  const auto ops = assemble_boundary_operators(ks, chi, sc.grid.N);
  const auto fbar = assemble_Fbar(ks, ops.C, chi, 2);

  const auto u_fn = [](double y) { return std::cos(pi * y) + y * y * y; };
  const auto du_fn = [](int d, double y) -> double {
    switch (d) {
      case 0: return std::cos(pi * y) + y * y * y;
      case 1: return -pi * std::sin(pi * y) + 3.0 * y * y;
      default: return -pi * pi * std::cos(pi * y) + 6.0 * y;
    }
  };
  // F applied directly to the boundary derivatives of u at x = 0
  double direct = 0.0;
  for (size_t d = 0; d < fbar.deriv_coeffs.size(); ++d) {
    direct += fbar.deriv_coeffs[d] * du_fn(static_cast<int>(d), 0.0);
  }
  // oracle: sum_i C_i d^i_x [int_0^x phi(x,y) u(y) dy] as x -> 0+, obtained
  // by differencing the analytic extension of the prefix integral across 0
  // (the integrand is entire, so the two-sided stencil recovers the
  // one-sided limit)
  const auto volterra = [&](double x) {
    if (x == 0.0) return 0.0;
    const int M = 400;
    std::vector<double> g(M + 1);
    for (int i = 0; i <= M; ++i) g[i] = ks.phi(0, 0, x, x * i / M) * u_fn(x * i / M);
    return quad::integrate_prefix(g, M, x / M);
  };
  const double h = 2e-3;
  std::vector<double> nodes(9), vals(9);
  for (int i = -4; i <= 4; ++i) {
    nodes[i + 4] = i * h;
    vals[i + 4] = volterra(i * h);
  }
  double extrapolated = 0.0;
  for (int d = 0; d < 4; ++d) {
    const double cd = ops.C.deriv_coeffs[d];
    if (cd == 0.0) continue;
    if (d == 0) {
      extrapolated += cd * vals[4];
      continue;
    }
    const auto w = fd::fornberg_weights(0.0, nodes, d);
    double dv = 0.0;
    for (int i = 0; i < 9; ++i) dv += w[i] * vals[i];
    extrapolated += cd * dv;
  }
  CHECK(std::abs(direct - extrapolated) <= 1e-5);
}

TEST_CASE("left-trace operator: difference-kernel closed form") {
  // phi(x,y) depends on x - y only, so with f(s) = phi(s, 0) the k-th
  // derivative of the prefix integral at 0 is sum_j f^(j)(0) u^{(k-1-j)}(0);
  // the trace coefficients must therefore be F[d] = sum_{i>d} C_i f^{(i-1-d)}(0).
  const auto sc = ScenarioFile::baseline();
  const auto ks = KernelSet::build(sc.plant, sc.gains.K);
  const auto chi = build_chi_table(ks, 2);
  const auto ops = assemble_boundary_operators(ks, chi, sc.grid.N);
  const auto fbar = assemble_Fbar(ks, ops.C, chi, 2);
  for (int d = 0; d < 3; ++d) {
    double expect = 0.0;
    for (int i = d + 1; i < 4; ++i) {
      expect += ops.C.deriv_coeffs[i] * ks.phi(i - 1 - d, 0, 0.0, 0.0);
    }
    CHECK(fbar.deriv_coeffs[d] == doctest::Approx(expect).epsilon(1e-12));
  }
}

#include "sandwich/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "sandwich/quadrature.hpp"

namespace sandwich {

ChiTable ChiTable::build(int k_max) {
  if (k_max < 1) throw std::invalid_argument("ChiTable: k_max must be >= 1");
  ChiTable t;
  t.coef_.resize(static_cast<size_t>(k_max));
  // chi_{1,0} = kappa(x,x)
  t.coef_[0] = {{1.0}};
  for (int k = 1; k < k_max; ++k) {
    const auto& prev = t.coef_[static_cast<size_t>(k - 1)];
    auto& next = t.coef_[static_cast<size_t>(k)];
    next.assign(static_cast<size_t>(k) + 1, {});
    // total derivative along the diagonal: (a,b) -> (a+1,b) + (a,b+1)
    const auto d_total = [](const std::vector<double>& row) {
      std::vector<double> out(row.size() + 1, 0.0);
      for (size_t a = 0; a < row.size(); ++a) {
        out[a + 1] += row[a];  // extra d_x
        out[a] += row[a];      // extra d_y
      }
      return out;
    };
    next[0] = prev[0];
    for (int j = 1; j < k; ++j) {
      const auto shifted = d_total(prev[static_cast<size_t>(j - 1)]);
      next[static_cast<size_t>(j)] = prev[static_cast<size_t>(j)];
      auto& row = next[static_cast<size_t>(j)];
      row.resize(std::max(row.size(), shifted.size()), 0.0);
      for (size_t a = 0; a < shifted.size(); ++a) row[a] += shifted[a];
    }
    auto last = d_total(prev[static_cast<size_t>(k - 1)]);
    last.resize(static_cast<size_t>(k) + 1, 0.0);
    last[static_cast<size_t>(k)] += 1.0;  // d^k_x kappa(x,y)|_{y=x}
    next[static_cast<size_t>(k)] = std::move(last);
  }
  return t;
}

const std::vector<double>& ChiTable::coefficients(int k, int j) const {
  if (k < 1 || k > k_max() || j < 0 || j >= k) {
    throw std::out_of_range("ChiTable: (k,j) outside the table");
  }
  return coef_[static_cast<size_t>(k - 1)][static_cast<size_t>(j)];
}

double ChiTable::eval(const DiagEval& diag, int k, int j, double x) const {
  const auto& row = coefficients(k, j);
  double v = 0.0;
  for (size_t a = 0; a < row.size(); ++a) {
    if (row[a] != 0.0) {
      v += row[a] * diag(static_cast<int>(a), j - static_cast<int>(a), x);
    }
  }
  return v;
}

ChiTable::DiagEval psi_diagonal(const KernelSet& kernels) {
  return [&kernels](int a, int b, double x) { return kernels.psi(a, b, x, x); };
}

ChiTable::DiagEval phi_diagonal(const KernelSet& kernels) {
  return [&kernels](int a, int b, double x) { return kernels.phi(a, b, x, x); };
}

ChiTable build_chi_table(const KernelSet& kernels, int m) {
  if (m != kernels.plant().m()) {
    throw std::invalid_argument("build_chi_table: order mismatch with kernels");
  }
  return ChiTable::build(std::max(1, 2 * m - 1));
}

AlphaBeta build_alpha_beta(const std::vector<double>& c, int m) {
  if (m < 1) throw std::invalid_argument("build_alpha_beta: m must be >= 1");
  if (static_cast<int>(c.size()) != m) {
    throw std::invalid_argument("build_alpha_beta: need exactly m gains");
  }
  for (double ci : c) {
    if (!(ci > 0.0)) throw std::invalid_argument("build_alpha_beta: gains must be positive");
  }
  AlphaBeta ab;
  ab.m = m;
  ab.c = c;
  if (m == 1) {
    ab.alpha = {0.0};
    ab.beta = {1.0};
    ab.y_coeff = {{1.0}};
    ab.tau_coeff = {};
    return ab;
  }
  const auto shift = [m](const std::vector<double>& v) {
    // multiply by d_t in the {d_t^i w(1,t)} basis
    std::vector<double> out(static_cast<size_t>(m), 0.0);
    for (int i = 0; i + 1 < m; ++i) out[static_cast<size_t>(i + 1)] = v[static_cast<size_t>(i)];
    return out;
  };
  const auto axpy = [](std::vector<double>& dst, double s, const std::vector<double>& v) {
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += s * v[i];
  };

  std::vector<std::vector<double>> y(static_cast<size_t>(m),
                                     std::vector<double>(static_cast<size_t>(m), 0.0));
  std::vector<std::vector<double>> tau(static_cast<size_t>(m - 1),
                                       std::vector<double>(static_cast<size_t>(m), 0.0));
  y[0][0] = 1.0;
  tau[0] = y[0];
  for (auto& v : tau[0]) v *= c[0];
  for (int k = 2; k <= m; ++k) {
    // y_k = d_t^{k-1} w(1) + tau_{k-1}
    y[static_cast<size_t>(k - 1)].assign(static_cast<size_t>(m), 0.0);
    y[static_cast<size_t>(k - 1)][static_cast<size_t>(k - 1)] = 1.0;
    axpy(y[static_cast<size_t>(k - 1)], 1.0, tau[static_cast<size_t>(k - 2)]);
    if (k <= m - 1) {
      // tau_k = tau'_{k-1} + y_{k-1} + c_k y_k
      tau[static_cast<size_t>(k - 1)] = shift(tau[static_cast<size_t>(k - 2)]);
      axpy(tau[static_cast<size_t>(k - 1)], 1.0, y[static_cast<size_t>(k - 2)]);
      axpy(tau[static_cast<size_t>(k - 1)], c[static_cast<size_t>(k - 1)],
           y[static_cast<size_t>(k - 1)]);
    }
  }
  // alpha: y_{m-1} + tau'_{m-1}; beta: y_m
  ab.alpha = y[static_cast<size_t>(m - 2)];
  axpy(ab.alpha, 1.0, shift(tau[static_cast<size_t>(m - 2)]));
  ab.beta = y[static_cast<size_t>(m - 1)];
  ab.y_coeff = y;
  ab.tau_coeff = tau;
  return ab;
}

double BoundaryOperator::apply(const std::vector<double>& stack) const {
  if (stack.size() < deriv_coeffs.size()) {
    throw std::invalid_argument("BoundaryOperator: derivative stack too short");
  }
  double v = 0.0;
  for (size_t i = 0; i < deriv_coeffs.size(); ++i) v += deriv_coeffs[i] * stack[i];
  return v;
}

BoundaryOperators assemble_boundary_operators(const KernelSet& kernels,
                                              const ChiTable& chi, int N) {
  const PlantConfig& plant = kernels.plant();
  const int n = plant.n(), m = plant.m();
  const double q = plant.q;
  const double qm = std::pow(q, m);
  const auto& abar = plant.abar;
  const auto psi_diag = psi_diagonal(kernels);

  BoundaryOperators ops;
  ops.B.boundary = BoundaryOperator::Boundary::Right;
  ops.B.deriv_coeffs.assign(static_cast<size_t>(2 * m), 0.0);
  ops.C.boundary = BoundaryOperator::Boundary::Left;
  ops.C.deriv_coeffs.assign(static_cast<size_t>(2 * m), 0.0);
  ops.E.state_gain = Eigen::RowVectorXd::Zero(n);

  auto& b = ops.B.deriv_coeffs;
  auto& cc = ops.C.deriv_coeffs;
  Eigen::RowVectorXd e_row = Eigen::RowVectorXd::Zero(n);

  // ---- right boundary (terms multiplying w(1,t) derivatives) -------------
  b[0] += abar[0];
  for (int k = 1; k <= m - 1; ++k) {
    const double ak = abar[static_cast<size_t>(k)] * std::pow(q, k);
    b[static_cast<size_t>(2 * k)] += ak;
    for (int j = 0; j <= 2 * k - 1; ++j) {
      b[static_cast<size_t>(2 * k - j - 1)] -= ak * chi.eval(psi_diag, 2 * k, j, 1.0);
    }
  }
  for (int i = 1; i <= 2 * m; ++i) {
    const double s = ((i % 2 == 0) ? 1.0 : -1.0) * kernels.phi(0, i - 1, 1.0, 1.0);
    b[static_cast<size_t>(2 * m - i)] += qm * s;
    for (int j = 0; j <= 2 * m - i - 1; ++j) {
      b[static_cast<size_t>(2 * m - i - j - 1)] -=
          qm * s * chi.eval(psi_diag, 2 * m - i, j, 1.0);
    }
  }

  // ---- left boundary (terms multiplying w(0,t) derivatives) --------------
  // The phi(1,0) group and the Phi(1) A^{i-1} B group both enter negated,
  // matching the m-th time derivative of the forward transform.
  for (int i = 1; i <= 2 * m; ++i) {
    const double s = ((i % 2 == 0) ? 1.0 : -1.0) * kernels.phi(0, i - 1, 1.0, 0.0);
    cc[static_cast<size_t>(2 * m - i)] -= qm * s;
    for (int j = 0; j <= 2 * m - i - 1; ++j) {
      cc[static_cast<size_t>(2 * m - i - j - 1)] +=
          qm * s * chi.eval(psi_diag, 2 * m - i, j, 0.0);
    }
  }
  const Eigen::RowVectorXd phi1 = kernels.Phi(0, 1.0);
  Eigen::MatrixXd a_pow = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i <= m; ++i) {
    const double pab = phi1 * a_pow * plant.B;
    const double g = pab * std::pow(q, m - i);
    const int d = 2 * (m - i) + 1;
    cc[static_cast<size_t>(d)] -= g;
    for (int j = 0; j <= d - 1; ++j) {
      cc[static_cast<size_t>(d - j - 1)] += g * chi.eval(psi_diag, d, j, 0.0);
    }
    a_pow = a_pow * plant.A;
  }
  // a_pow is now A^m

  // ---- state row ----------------------------------------------------------
  for (int i = 1; i <= 2 * m; ++i) {
    const double s0 = ((i % 2 == 0) ? 1.0 : -1.0) * kernels.phi(0, i - 1, 1.0, 0.0);
    const double s1 = ((i % 2 == 0) ? 1.0 : -1.0) * kernels.phi(0, i - 1, 1.0, 1.0);
    e_row += qm * s0 * kernels.Gamma(2 * m - i, 0.0);
    e_row -= qm * s1 * kernels.Gamma(2 * m - i, 1.0);
  }
  Eigen::MatrixXd a_pow2 = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i <= m; ++i) {
    const double pab = phi1 * a_pow2 * plant.B;
    const double g = pab * std::pow(q, m - i);
    e_row += g * kernels.Gamma(2 * (m - i) + 1, 0.0);
    a_pow2 = a_pow2 * plant.A;
  }
  e_row -= phi1 * a_pow2;  // - Phi(1) A^m
  for (int k = 1; k <= m - 1; ++k) {
    e_row -= abar[static_cast<size_t>(k)] * std::pow(q, k) * kernels.Gamma(2 * k, 1.0);
  }
  e_row -= abar[0] * kernels.Gamma(0, 1.0);

  // ---- integral kernel on the grid ----------------------------------------
  const double h = 1.0 / N;
  ops.D.integral_kernel.assign(static_cast<size_t>(N) + 1, 0.0);
  std::vector<double> phi_2m(static_cast<size_t>(N) + 1);  // d^{2m}_y phi(1,y)
  for (int jg = 0; jg <= N; ++jg) {
    phi_2m[static_cast<size_t>(jg)] = kernels.phi(0, 2 * m, 1.0, jg * h);
  }
  // quadrature contribution to E: + q^m int d^{2m}_y phi(1,y) Gamma(y) dy
  {
    std::vector<Eigen::RowVectorXd> rows(static_cast<size_t>(N) + 1);
    for (int jg = 0; jg <= N; ++jg) {
      rows[static_cast<size_t>(jg)] =
          phi_2m[static_cast<size_t>(jg)] * kernels.Gamma(0, jg * h);
    }
    for (int c_i = 0; c_i < n; ++c_i) {
      std::vector<double> f(static_cast<size_t>(N) + 1);
      for (int jg = 0; jg <= N; ++jg) f[static_cast<size_t>(jg)] = rows[static_cast<size_t>(jg)](c_i);
      e_row(c_i) += qm * quad::simpson(f, h);
    }
  }
  ops.E.state_gain = e_row;

  for (int jg = 0; jg <= N; ++jg) {
    const double y = jg * h;
    double v = abar[0] * kernels.psi(0, 0, 1.0, y);
    for (int k = 1; k <= m - 1; ++k) {
      v += abar[static_cast<size_t>(k)] * std::pow(q, k) * kernels.psi(2 * k, 0, 1.0, y);
    }
    for (int i = 1; i <= 2 * m; ++i) {
      const double s = ((i % 2 == 0) ? 1.0 : -1.0) * kernels.phi(0, i - 1, 1.0, 1.0);
      v += qm * s * kernels.psi(2 * m - i, 0, 1.0, y);
    }
    v += qm * phi_2m[static_cast<size_t>(jg)];
    // nested term - q^m int_y^1 d^{2m}_y phi(1,z) psi(z,y) dz, Simpson on the tail
    const int tail = N - jg;
    if (tail >= 1) {
      std::vector<double> f(static_cast<size_t>(tail) + 1);
      for (int t = 0; t <= tail; ++t) {
        const double z = (jg + t) * h;
        f[static_cast<size_t>(t)] = phi_2m[static_cast<size_t>(jg + t)] * kernels.psi(0, 0, z, y);
      }
      v -= qm * quad::integrate_prefix(f, tail, h);
    }
    ops.D.integral_kernel[static_cast<size_t>(jg)] = v;
  }

  return ops;
}

BoundaryOperator assemble_L(const BoundaryOperator& B_op, const AlphaBeta& ab,
                            double q) {
  if (static_cast<int>(B_op.deriv_coeffs.size()) != 2 * ab.m) {
    throw std::invalid_argument("assemble_L: operator order mismatch");
  }
  BoundaryOperator L;
  L.boundary = BoundaryOperator::Boundary::Right;
  L.deriv_coeffs.assign(B_op.deriv_coeffs.size(), 0.0);
  for (size_t i = 0; i < L.deriv_coeffs.size(); ++i) {
    L.deriv_coeffs[i] = -B_op.deriv_coeffs[i];
  }
  const double cm = ab.c.back();
  for (int i = 0; i < ab.m; ++i) {
    L.deriv_coeffs[static_cast<size_t>(2 * i)] -=
        std::pow(q, i) *
        (ab.alpha[static_cast<size_t>(i)] + cm * ab.beta[static_cast<size_t>(i)]);
  }
  return L;
}

BoundaryOperator assemble_Fbar(const KernelSet& kernels,
                               const BoundaryOperator& C_op,
                               const ChiTable& chi, int m) {
  BoundaryOperator fbar;
  fbar.boundary = BoundaryOperator::Boundary::Left;
  fbar.deriv_coeffs.assign(static_cast<size_t>(std::max(1, 2 * m - 1)), 0.0);
  const auto phi_diag = phi_diagonal(kernels);
  for (size_t i = 0; i < C_op.deriv_coeffs.size(); ++i) {
    const double ci = C_op.deriv_coeffs[i];
    if (ci == 0.0) continue;
    for (int j = 0; j < static_cast<int>(i); ++j) {
      fbar.deriv_coeffs[i - static_cast<size_t>(j) - 1] +=
          ci * chi.eval(phi_diag, static_cast<int>(i), j, 0.0);
    }
  }
  return fbar;
}

}  // namespace sandwich

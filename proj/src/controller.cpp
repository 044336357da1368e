#include "sandwich/controller.hpp"

#include <cmath>
#include <stdexcept>

#include "sandwich/linalg.hpp"
#include "sandwich/quadrature.hpp"

namespace sandwich {

ControllerSynthesis ControllerSynthesis::synthesize(const PlantConfig& plant,
                                                    const GridSpec& grid,
                                                    const GainSet& gains,
                                                    int stencil_accuracy) {
  plant.validate();
  grid.validate(plant);
  const int n = plant.n(), m = plant.m();
  if (gains.K.size() != n) throw std::invalid_argument("synthesize: K must be 1 x n");
  if (static_cast<int>(gains.c.size()) != m) {
    throw std::invalid_argument("synthesize: need exactly m chain gains");
  }
  for (double c : gains.c) {
    if (!(c > 0.0)) throw std::invalid_argument("synthesize: chain gains must be positive");
  }
  if (stencil_accuracy < 1) throw std::invalid_argument("synthesize: stencil accuracy must be >= 1");
  if (2 * m - 1 + stencil_accuracy > grid.points()) {
    throw std::invalid_argument("synthesize: grid too coarse for the boundary stencils");
  }

  const Eigen::MatrixXd ctrb = linalg::controllability_matrix(plant.A, plant.B);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ctrb);
  lu.setThreshold(1e-10);
  if (lu.rank() < n) throw std::runtime_error("synthesize: (A,B) is uncontrollable");

  const Eigen::MatrixXd a_cl = plant.A + plant.B * gains.K;
  if (!linalg::is_hurwitz(a_cl)) {
    throw std::runtime_error("synthesize: A + B K is not Hurwitz");
  }

  ControllerSynthesis cs;
  cs.plant_ = plant;
  cs.grid_ = grid;
  cs.gains_ = gains;
  cs.acc_ = stencil_accuracy;
  cs.kernels_ = KernelSet::build(plant, gains.K);
  cs.chi_ = build_chi_table(cs.kernels_, m);
  cs.ab_ = build_alpha_beta(gains.c, m);
  cs.ops_ = assemble_boundary_operators(cs.kernels_, cs.chi_, grid.N);
  cs.L_ = assemble_L(cs.ops_.B, cs.ab_, plant.q);
  cs.fbar_ = assemble_Fbar(cs.kernels_, cs.ops_.C, cs.chi_, m);
  cs.lyap_P_ = linalg::solve_lyapunov(a_cl, Eigen::MatrixXd::Identity(n, n));

  // report
  cs.report_.eig_A_BK = linalg::eigenvalues(a_cl);
  cs.report_.hurwitz_margin = -linalg::spectral_abscissa(a_cl);
  cs.report_.cond_G = cs.kernels_.cond_G();
  cs.report_.cond_G1 = cs.kernels_.cond_G1();
  cs.report_.gamma_sign = cs.kernels_.gamma_sign();
  cs.report_.alpha = cs.ab_.alpha;
  cs.report_.beta = cs.ab_.beta;
  cs.report_.chain_poly.assign(static_cast<size_t>(m) + 1, 0.0);
  cs.report_.chain_poly[static_cast<size_t>(m)] = 1.0;
  const double cm = gains.c.back();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) companion(i, i + 1) = 1.0;
  for (int i = 0; i < m; ++i) {
    const double coeff = cs.ab_.alpha[static_cast<size_t>(i)] +
                         cm * cs.ab_.beta[static_cast<size_t>(i)];
    cs.report_.chain_poly[static_cast<size_t>(i)] = coeff;
    companion(m - 1, i) = -coeff;
  }
  cs.report_.chain_poly_hurwitz = (m == 1) ? (cs.report_.chain_poly[0] > 0.0)
                                           : linalg::is_hurwitz(companion);
  if (!cs.report_.chain_poly_hurwitz) {
    cs.report_.warnings.push_back(
        "input-chain companion polynomial is not Hurwitz for the supplied gains");
  }

  // ---- grid caches ---------------------------------------------------------
  const int N = grid.N;
  const double h = grid.dx();
  const int ord = 2 * m;  // derivative stack covers i = 0..2m-1

  cs.phi_diff_.resize(static_cast<size_t>(N) + 1);
  for (int d = 0; d <= N; ++d) {
    cs.phi_diff_[static_cast<size_t>(d)] = cs.kernels_.phi(0, 0, d * h, 0.0);
  }
  cs.Phi_grid_.resize(static_cast<size_t>(N) + 1);
  cs.prefix_w_.resize(static_cast<size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) {
    cs.Phi_grid_[static_cast<size_t>(i)] = cs.kernels_.Phi(0, i * h);
    cs.prefix_w_[static_cast<size_t>(i)] = quad::prefix_weights(i, h);
  }

  cs.PhiD1_.resize(static_cast<size_t>(ord));
  cs.PhiD0_.resize(static_cast<size_t>(ord));
  for (int i = 0; i < ord; ++i) {
    cs.PhiD1_[static_cast<size_t>(i)] = cs.kernels_.Phi(i, 1.0);
    cs.PhiD0_[static_cast<size_t>(i)] = cs.kernels_.Phi(i, 0.0);
  }

  const auto phi_diag = phi_diagonal(cs.kernels_);
  cs.chi_phi1_.assign(static_cast<size_t>(ord), {});
  cs.chi_phi0_.assign(static_cast<size_t>(ord), {});
  for (int k = 1; k < ord; ++k) {
    cs.chi_phi1_[static_cast<size_t>(k)].resize(static_cast<size_t>(k));
    cs.chi_phi0_[static_cast<size_t>(k)].resize(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
      cs.chi_phi1_[static_cast<size_t>(k)][static_cast<size_t>(j)] =
          cs.chi_.eval(phi_diag, k, j, 1.0);
      cs.chi_phi0_[static_cast<size_t>(k)][static_cast<size_t>(j)] =
          cs.chi_.eval(phi_diag, k, j, 0.0);
    }
  }

  cs.lphi_kernel_.assign(static_cast<size_t>(N) + 1, 0.0);
  for (int i = 0; i < ord; ++i) {
    const double li = cs.L_.deriv_coeffs[static_cast<size_t>(i)];
    if (li == 0.0) continue;
    for (int j = 0; j <= N; ++j) {
      cs.lphi_kernel_[static_cast<size_t>(j)] += li * cs.kernels_.phi(i, 0, 1.0, j * h);
    }
  }
  // chi^phi corrections of L at x=1, folded per u-derivative order
  cs.trace_right_.assign(static_cast<size_t>(ord), 0.0);
  for (int i = 1; i < ord; ++i) {
    const double li = cs.L_.deriv_coeffs[static_cast<size_t>(i)];
    if (li == 0.0) continue;
    for (int j = 0; j < i; ++j) {
      cs.trace_right_[static_cast<size_t>(i - j - 1)] +=
          li * cs.chi_phi1_[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  cs.lphi1_ = Eigen::RowVectorXd::Zero(n);
  cs.cphi0_ = Eigen::RowVectorXd::Zero(n);
  for (int i = 0; i < ord; ++i) {
    cs.lphi1_ += cs.L_.deriv_coeffs[static_cast<size_t>(i)] * cs.PhiD1_[static_cast<size_t>(i)];
    cs.cphi0_ += cs.ops_.C.deriv_coeffs[static_cast<size_t>(i)] * cs.PhiD0_[static_cast<size_t>(i)];
  }

  return cs;
}

double ControllerSynthesis::measure_ux0(const std::vector<double>& u) const {
  return fd::boundary_derivative(u, grid_.dx(), 1, acc_, fd::Side::Left);
}

std::vector<double> ControllerSynthesis::u_stack(const std::vector<double>& u,
                                                 fd::Side side) const {
  const int ord = 2 * plant_.m();
  std::vector<double> stack(static_cast<size_t>(ord));
  for (int i = 0; i < ord; ++i) {
    stack[static_cast<size_t>(i)] =
        fd::boundary_derivative(u, grid_.dx(), i, acc_, side);
  }
  return stack;
}

double ControllerSynthesis::state_feedback_U(const std::vector<double>& u,
                                             const Eigen::VectorXd& X) const {
  if (static_cast<int>(u.size()) != grid_.points()) {
    throw std::invalid_argument("state_feedback_U: field size does not match grid");
  }
  const int ord = 2 * plant_.m();
  const auto du1 = u_stack(u, fd::Side::Right);
  const auto du0 = u_stack(u, fd::Side::Left);

  double v = 0.0;
  for (int i = 0; i < ord; ++i) {
    v += L_.deriv_coeffs[static_cast<size_t>(i)] * du1[static_cast<size_t>(i)];
    v -= ops_.C.deriv_coeffs[static_cast<size_t>(i)] * du0[static_cast<size_t>(i)];
    v -= trace_right_[static_cast<size_t>(i)] * du1[static_cast<size_t>(i)];
    v += fbar_.deriv_coeffs.size() > static_cast<size_t>(i)
             ? fbar_.deriv_coeffs[static_cast<size_t>(i)] * du0[static_cast<size_t>(i)]
             : 0.0;
  }
  // - L int_0^1 phi(1,y) u dy (derivatives passed through the integral)
  std::vector<double> f(u.size());
  for (size_t j = 0; j < u.size(); ++j) f[j] = lphi_kernel_[j] * u[j];
  v -= quad::simpson(f, grid_.dx());
  // - (L Phi(1) - C Phi(0)) X
  v -= (lphi1_ - cphi0_) * X;
  return v;
}

std::vector<double> ControllerSynthesis::w_grid(const std::vector<double>& u,
                                                const Eigen::VectorXd& X) const {
  const int N = grid_.N;
  std::vector<double> w(u.size());
  for (int i = 0; i <= N; ++i) {
    double integral = 0.0;
    const auto& wt = prefix_w_[static_cast<size_t>(i)];
    for (int j = 0; j <= i; ++j) {
      integral += wt[static_cast<size_t>(j)] *
                  phi_diff_[static_cast<size_t>(i - j)] * u[static_cast<size_t>(j)];
    }
    w[static_cast<size_t>(i)] =
        u[static_cast<size_t>(i)] - integral - Phi_grid_[static_cast<size_t>(i)] * X;
  }
  return w;
}

double ControllerSynthesis::w_at_right(const std::vector<double>& u,
                                       const Eigen::VectorXd& X) const {
  const int N = grid_.N;
  std::vector<double> f(u.size());
  for (int j = 0; j <= N; ++j) {
    f[static_cast<size_t>(j)] = phi_diff_[static_cast<size_t>(N - j)] * u[static_cast<size_t>(j)];
  }
  return u.back() - quad::simpson(f, grid_.dx()) - Phi_grid_.back() * X;
}

double ControllerSynthesis::w_at_left(const std::vector<double>& u,
                                      const Eigen::VectorXd& X) const {
  return u.front() - Phi_grid_.front() * X;
}

ControllerSynthesis::WBoundary ControllerSynthesis::w_boundary_stacks(
    const std::vector<double>& u, const Eigen::VectorXd& X) const {
  const int ord = 2 * plant_.m();
  const auto du1 = u_stack(u, fd::Side::Right);
  const auto du0 = u_stack(u, fd::Side::Left);
  WBoundary wb;
  wb.right.resize(static_cast<size_t>(ord));
  wb.left.resize(static_cast<size_t>(ord));
  for (int i = 0; i < ord; ++i) {
    // right: d^i_x w(1) = d^i_x u(1) - int d^i_x phi(1,y) u dy
    //        - sum_j chi^phi_{i,j}(1) d^{i-j-1}_x u(1) - Phi^(i)(1) X
    std::vector<double> f(u.size());
    for (size_t j = 0; j < u.size(); ++j) {
      f[j] = kernels_.phi(i, 0, 1.0, static_cast<double>(j) * grid_.dx()) * u[j];
    }
    double v = du1[static_cast<size_t>(i)] - quad::simpson(f, grid_.dx());
    for (int j = 0; j < i; ++j) {
      v -= chi_phi1_[static_cast<size_t>(i)][static_cast<size_t>(j)] *
           du1[static_cast<size_t>(i - j - 1)];
    }
    v -= PhiD1_[static_cast<size_t>(i)] * X;
    wb.right[static_cast<size_t>(i)] = v;

    double v0 = du0[static_cast<size_t>(i)];
    for (int j = 0; j < i; ++j) {
      v0 -= chi_phi0_[static_cast<size_t>(i)][static_cast<size_t>(j)] *
            du0[static_cast<size_t>(i - j - 1)];
    }
    v0 -= PhiD0_[static_cast<size_t>(i)] * X;
    wb.left[static_cast<size_t>(i)] = v0;
  }
  return wb;
}

ControllerSynthesis::BacksteppingCoords ControllerSynthesis::backstepping_coords(
    const std::vector<double>& u, const Eigen::VectorXd& X) const {
  const int m = plant_.m();
  BacksteppingCoords bc;
  bc.w = w_grid(u, X);
  const auto wb = w_boundary_stacks(u, X);
  // d_t^k w(1) realized through q^k d^{2k}_x w(1)
  std::vector<double> dtw(static_cast<size_t>(m), 0.0);
  for (int k = 0; k < m; ++k) {
    dtw[static_cast<size_t>(k)] = std::pow(plant_.q, k) * wb.right[static_cast<size_t>(2 * k)];
  }
  bc.y.assign(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      bc.y[static_cast<size_t>(i)] +=
          ab_.y_coeff[static_cast<size_t>(i)][static_cast<size_t>(k)] * dtw[static_cast<size_t>(k)];
    }
  }
  return bc;
}

double ControllerSynthesis::boundary_identity_rhs(const std::vector<double>& u,
                                                  const Eigen::VectorXd& X,
                                                  double U) const {
  const auto wb = w_boundary_stacks(u, X);
  const auto w = w_grid(u, X);
  std::vector<double> f(w.size());
  for (size_t j = 0; j < w.size(); ++j) f[j] = ops_.D.integral_kernel[j] * w[j];
  const double integral = quad::simpson(f, grid_.dx());
  return ops_.B.apply(wb.right) + ops_.C.apply(wb.left) - integral +
         ops_.E.state_gain * X + U;
}

double ControllerSynthesis::closed_chain_rhs(const std::vector<double>& u,
                                             const Eigen::VectorXd& X) const {
  const int m = plant_.m();
  const auto wb = w_boundary_stacks(u, X);
  const auto w = w_grid(u, X);
  std::vector<double> f(w.size());
  for (size_t j = 0; j < w.size(); ++j) f[j] = ops_.D.integral_kernel[j] * w[j];
  const double integral = quad::simpson(f, grid_.dx());
  double v = -integral + ops_.E.state_gain * X;
  const double cm = gains_.c.back();
  for (int i = 0; i < m; ++i) {
    v -= (ab_.alpha[static_cast<size_t>(i)] + cm * ab_.beta[static_cast<size_t>(i)]) *
         std::pow(plant_.q, i) * wb.right[static_cast<size_t>(2 * i)];
  }
  return v;
}

}  // namespace sandwich

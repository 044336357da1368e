#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sandwich/kernels.hpp"
#include "sandwich/operators.hpp"
#include "sandwich/plant.hpp"
#include "sandwich/stencils.hpp"

namespace sandwich {

/// Controller gains (K, c_1..c_m) and estimator injection gains (P0, P2).
struct GainSet {
  Eigen::RowVectorXd K;
  std::vector<double> c;
  Eigen::VectorXd P0;
  Eigen::VectorXd P2;
};

struct SynthesisReport {
  std::vector<std::complex<double>> eig_A_BK;
  double hurwitz_margin = 0.0;  // -max Re eig(A+BK)
  double cond_G = 0.0;
  double cond_G1 = 0.0;
  int gamma_sign = 0;
  std::vector<double> alpha, beta;
  std::vector<double> chain_poly;  // s^m + sum (alpha_i + c_m beta_i) s^i
  bool chain_poly_hurwitz = false;
  std::vector<std::string> warnings;
};

/// Everything precomputed on the grid that the feedback law needs:
/// boundary operators, kernel samples, trace corrections, and the transform
/// caches used for diagnostics.  Immutable after synthesize().
class ControllerSynthesis {
 public:
  /// Full synthesis pipeline: kernels, chi table, alpha/beta recursion,
  /// boundary operators, feedback operator, grid caches.
  /// Throws on: uncontrollable (A,B), A+BK not Hurwitz, nonpositive c_i,
  /// singular G/G1.
  static ControllerSynthesis synthesize(const PlantConfig& plant,
                                        const GridSpec& grid,
                                        const GainSet& gains,
                                        int stencil_accuracy = 1);

  /// U(t) from the full plant state (field samples + left ODE state).
  double state_feedback_U(const std::vector<double>& u_grid,
                          const Eigen::VectorXd& X) const;
  /// Same law evaluated on estimator states (identical code path).
  double output_feedback_U(const std::vector<double>& u_hat,
                           const Eigen::VectorXd& X_hat) const {
    return state_feedback_U(u_hat, X_hat);
  }

  /// Transformed field w on the grid plus the chain coordinates y_1..y_m.
  struct BacksteppingCoords {
    std::vector<double> w;
    std::vector<double> y;
  };
  BacksteppingCoords backstepping_coords(const std::vector<double>& u_grid,
                                         const Eigen::VectorXd& X) const;

  /// Transformed field only.
  std::vector<double> w_grid(const std::vector<double>& u_grid,
                             const Eigen::VectorXd& X) const;
  /// w boundary value at x=1 (full-domain quadrature) and x=0.
  double w_at_right(const std::vector<double>& u_grid, const Eigen::VectorXd& X) const;
  double w_at_left(const std::vector<double>& u_grid, const Eigen::VectorXd& X) const;

  /// Derivative stacks d^i_x w at the boundaries, i = 0..2m-1, obtained from
  /// the u-stacks through the transform expansion.
  struct WBoundary {
    std::vector<double> right;  // at x = 1
    std::vector<double> left;   // at x = 0
  };
  WBoundary w_boundary_stacks(const std::vector<double>& u_grid,
                              const Eigen::VectorXd& X) const;

  /// RHS of the input-chain boundary identity
  ///   B w(1) + C w(0) - int D w + E X + U.
  double boundary_identity_rhs(const std::vector<double>& u_grid,
                               const Eigen::VectorXd& X, double U) const;
  /// RHS of the closed chain: -int D w + E X - sum (alpha_i + c_m beta_i) d_t^i w(1).
  double closed_chain_rhs(const std::vector<double>& u_grid,
                          const Eigen::VectorXd& X) const;

  const SynthesisReport& report() const { return report_; }
  const KernelSet& kernels() const { return kernels_; }
  const ChiTable& chi() const { return chi_; }
  const AlphaBeta& alpha_beta() const { return ab_; }
  const BoundaryOperators& operators() const { return ops_; }
  const BoundaryOperator& L() const { return L_; }
  const BoundaryOperator& Fbar() const { return fbar_; }
  const PlantConfig& plant() const { return plant_; }
  const GridSpec& grid() const { return grid_; }
  const GainSet& gains() const { return gains_; }
  int stencil_accuracy() const { return acc_; }
  const Eigen::MatrixXd& lyapunov_P() const { return lyap_P_; }

  /// One-sided boundary measurement u_x(0,t) with the synthesis stencil;
  /// shared by the plant coupling, the estimator innovation, and the law.
  double measure_ux0(const std::vector<double>& u_grid) const;

 private:
  ControllerSynthesis() = default;
  std::vector<double> u_stack(const std::vector<double>& u_grid,
                              fd::Side side) const;

  PlantConfig plant_;
  GridSpec grid_;
  GainSet gains_;
  int acc_ = 1;
  KernelSet kernels_;
  ChiTable chi_;
  AlphaBeta ab_;
  BoundaryOperators ops_;
  BoundaryOperator L_;
  BoundaryOperator fbar_;
  SynthesisReport report_;
  Eigen::MatrixXd lyap_P_;

  // grid caches
  std::vector<double> lphi_kernel_;           // sum_i L_i d^i_x phi(1,y_j)
  std::vector<double> trace_right_;           // chi^phi corrections folded into L at x=1
  Eigen::RowVectorXd lphi1_, cphi0_;          // sum_i L_i Phi^(i)(1), sum_i C_i Phi^(i)(0)
  std::vector<Eigen::RowVectorXd> PhiD1_, PhiD0_;  // Phi^(i) at the boundaries
  std::vector<std::vector<double>> chi_phi1_, chi_phi0_;  // chi^phi_{k,j} traces
  std::vector<double> phi_diff_;              // phi(d*h, 0), d = 0..N
  std::vector<Eigen::RowVectorXd> Phi_grid_;  // Phi(x_i)
  std::vector<std::vector<double>> prefix_w_; // quadrature weights per grid point
};

}  // namespace sandwich

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "sandwich/plant.hpp"

namespace sandwich {

/// Companion blocks behind the closed-form transformation kernels.
/// D drives the forward pair (phi, Phi), E the inverse pair (psi, Gamma);
/// F/G and F1/G1 drive the estimator kernels (vartheta resp. theta), with
/// G = bottom-left block of e^F (nonsingular iff the boundary-value problems
/// are solvable for this A_z resp. A).
struct KernelBlocks {
  Eigen::MatrixXd D;   // 2n x 2n
  Eigen::MatrixXd E;   // 2n x 2n
  Eigen::MatrixXd F;   // 2m x 2m
  Eigen::MatrixXd G;   // m x m
  Eigen::MatrixXd F1;  // 2n x 2n
  Eigen::MatrixXd G1;  // n x n
};

KernelBlocks build_block_matrices(const PlantConfig& plant,
                                  const Eigen::RowVectorXd& K);

/// Closed-form evaluators for the transformation kernels and their partial
/// derivatives of any order up to 2m+1.  Derivatives multiply companion-block
/// powers inside the matrix exponential, so they are analytic, not numeric.
///
/// The inverse-pair sign (gamma_sign, applied to both psi and Gamma) is
/// resolved at build time by a transform round-trip probe and recorded.
class KernelSet {
 public:
  KernelSet() = default;  // empty set; only build() produces a usable one
  static KernelSet build(const PlantConfig& plant, const Eigen::RowVectorXd& K);

  // -- controller kernels -------------------------------------------------
  /// d^a_x d^b_y phi(x,y) on the triangle 0 <= y <= x <= 1 (small slack
  /// allowed for finite-difference diagnostics).
  double phi(int dx_order, int dy_order, double x, double y) const;
  /// d^k Phi(x) / dx^k, a 1 x n row.
  Eigen::RowVectorXd Phi(int dx_order, double x) const;
  double psi(int dx_order, int dy_order, double x, double y) const;
  Eigen::RowVectorXd Gamma(int dx_order, double x) const;

  // -- estimator kernels ---------------------------------------------------
  /// d^k vartheta(x) / dx^k, a 1 x m row.
  Eigen::RowVectorXd vartheta(int dx_order, double x) const;
  /// d^k theta(x) / dx^k, a 1 x n row.
  Eigen::RowVectorXd theta(int dx_order, double x) const;

  int gamma_sign() const { return gamma_sign_; }
  int max_order() const { return max_order_; }
  const KernelBlocks& blocks() const { return blocks_; }
  const PlantConfig& plant() const { return plant_; }
  const Eigen::RowVectorXd& K() const { return K_; }
  double cond_G() const { return cond_G_; }
  double cond_G1() const { return cond_G1_; }

  /// Apply the forward transform w = u - int_0^x phi(x,y) u dy - Phi(x) X on
  /// a uniform grid (Simpson prefix quadrature).
  std::vector<double> forward_transform(const std::vector<double>& u,
                                        const Eigen::VectorXd& X) const;
  /// Inverse transform u = w - int_0^x psi(x,y) w dy - Gamma(x) X.
  std::vector<double> inverse_transform(const std::vector<double>& w,
                                        const Eigen::VectorXd& X) const;

  /// Max abs error of inverse(forward(u)) against u for a battery of
  /// profiles/states on an N-interval grid.
  double roundtrip_max_error(const std::vector<std::vector<double>>& profiles,
                             const std::vector<Eigen::VectorXd>& states,
                             int N) const;

  /// Long-format CSV dump (kernel,x,y,value) of grid samples for plotting.
  void dump_csv(std::ostream& os, int N) const;

 private:
  const Eigen::MatrixXd& dpow(int k) const { return Dpow_[static_cast<size_t>(k)]; }
  const Eigen::MatrixXd& epow(int k) const { return Epow_[static_cast<size_t>(k)]; }
  void check_order(int a, int b) const;
  void check_triangle(double x, double y) const;

  PlantConfig plant_;
  Eigen::RowVectorXd K_;
  KernelBlocks blocks_;
  Eigen::RowVectorXd fwd_row_;   // [C_X, K - C_X B C_X / q]
  Eigen::RowVectorXd inv_row_;   // [C_X, K]
  Eigen::RowVectorXd vth_row_;   // [0, -C_z G^{-1}]
  Eigen::RowVectorXd th_row_;    // [-C_X, C_X (e^F1)_11 G1^{-1}]
  std::vector<Eigen::MatrixXd> Dpow_, Epow_, Fpow_, F1pow_;
  int gamma_sign_ = -1;
  int max_order_ = 0;
  double cond_G_ = 0.0, cond_G1_ = 0.0;
};

}  // namespace sandwich

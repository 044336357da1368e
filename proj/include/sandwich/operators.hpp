#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sandwich/kernels.hpp"

namespace sandwich {

/// Diagonal-trace coefficient table for the k-th x-derivative of a Volterra
/// term int_0^x kappa(x,y) f(y) dy:
///
///   d^k/dx^k int = int d^k_x kappa f dy + sum_{j=0}^{k-1} chi_{k,j}(x) f^{(k-j-1)}(x),
///   chi_{k,j}(x) = sum_a coef[k][j][a] * d^a_x d^{j-a}_y kappa(x,y)|_{y=x}.
///
/// The coefficients are pure combinatorics (independent of the kernel); the
/// recursion closing the table is
///   chi_{k+1,0} = chi_{k,0},
///   chi_{k+1,j} = chi_{k,j} + chi'_{k,j-1}            (1 <= j <= k-1),
///   chi_{k+1,k} = chi'_{k,k-1} + d^k_x kappa(x,y)|_{y=x},
/// with chi' the total derivative along the diagonal.
class ChiTable {
 public:
  using DiagEval = std::function<double(int dx_order, int dy_order, double x)>;

  /// Table for k = 1 .. k_max.
  static ChiTable build(int k_max);

  int k_max() const { return static_cast<int>(coef_.size()); }

  /// chi_{k,j}(x) against a kernel's diagonal-derivative evaluator.
  double eval(const DiagEval& diag, int k, int j, double x) const;

  /// Raw coefficient row (index a = x-derivative order, j - a = y order).
  const std::vector<double>& coefficients(int k, int j) const;

 private:
  // coef_[k-1][j][a]
  std::vector<std::vector<std::vector<double>>> coef_;
};

/// ChiTable evaluator bound to psi (inverse kernel) of a KernelSet.
ChiTable::DiagEval psi_diagonal(const KernelSet& kernels);
/// ChiTable evaluator bound to phi (forward kernel).
ChiTable::DiagEval phi_diagonal(const KernelSet& kernels);

ChiTable build_chi_table(const KernelSet& kernels, int m);

/// Virtual-control recursion coefficients over the basis
/// {w(1,t), d_t w(1,t), ..., d_t^{m-1} w(1,t)}.
struct AlphaBeta {
  int m = 0;
  std::vector<double> c;      // c_1..c_m
  std::vector<double> alpha;  // y_{m-1} + tau'_{m-1}
  std::vector<double> beta;   // y_m
  // full chain, kept for diagnostics: y_coeff[k] are the coordinates of
  // y_{k+1}, tau_coeff[k] of tau_{k+1}
  std::vector<std::vector<double>> y_coeff;
  std::vector<std::vector<double>> tau_coeff;
};

/// Runs the recursion tau_1 = c_1 y_1; tau_k = tau'_{k-1} + y_{k-1} + c_k y_k;
/// y_{k+1} = d_t^k w(1,t) + tau_k.  For m = 1 the degenerate convention
/// alpha = (0), beta = (1) applies (control law -B w(1) - C w(0) - c_1 y_1).
AlphaBeta build_alpha_beta(const std::vector<double>& c, int m);

/// A finite sum of scaled spatial-derivative evaluations at one boundary,
/// plus (for the integral operator) a kernel sampled on the grid and (for the
/// state operator) a gain row on X.
struct BoundaryOperator {
  enum class Boundary { Left, Right };
  Boundary boundary = Boundary::Right;
  std::vector<double> deriv_coeffs;     // c_i * d^i_x(.) at the boundary
  Eigen::RowVectorXd state_gain;        // optional row acting on X
  std::vector<double> integral_kernel;  // optional sampled kernel over y

  /// Apply the derivative part to a stack of boundary derivatives.
  double apply(const std::vector<double>& derivative_stack) const;
};

/// The assembled right-hand side of the input-chain boundary identity
///   d_t^m w(1,t) = B w(1,t) + C w(0,t) - int_0^1 D(y) w(y,t) dy + E X(t) + U.
struct BoundaryOperators {
  BoundaryOperator B;  // right-boundary derivative coefficients on w
  BoundaryOperator C;  // left-boundary derivative coefficients on w
  BoundaryOperator D;  // sampled integral kernel D(y)
  BoundaryOperator E;  // constant row on X
};

/// Assemble B, C, D(y), E on an N-interval grid from the kernel evaluators
/// and the chi table (signs follow the m-th time derivative of the forward
/// transform; see tests for the m = 1 hand expansion).
BoundaryOperators assemble_boundary_operators(const KernelSet& kernels,
                                              const ChiTable& chi, int N);

/// L = -B - sum_i q^i (alpha_i + c_m beta_i) d^{2i}_x, the time/space
/// exchange d_t^i w(1) = q^i d^{2i}_x w(1) applied once, here.
BoundaryOperator assemble_L(const BoundaryOperator& B_op, const AlphaBeta& ab,
                            double q);

/// Left-boundary operator on u collecting the diagonal-trace terms of C
/// applied to x -> int_0^x phi(x,y) u(y) dy at x = 0 (the integral itself
/// vanishes there).  Coefficients cover d^0_x u(0) .. d^{2m-2}_x u(0).
BoundaryOperator assemble_Fbar(const KernelSet& kernels,
                               const BoundaryOperator& C_op,
                               const ChiTable& chi, int m);

}  // namespace sandwich

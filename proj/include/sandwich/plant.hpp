#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sandwich {

/// Plant data: an n-state ODE at the left boundary, the heat PDE on [0,1],
/// and an m-state companion-form input ODE at the right boundary.
///
///   X' = A X + B u_x(0,t)
///   u_t = q u_xx,  u(0,t) = C_X X,  u(1,t) = C_z Z
///   Z' = A_z Z + B_z U
struct PlantConfig {
  Eigen::MatrixXd A;      // n x n
  Eigen::VectorXd B;      // n
  Eigen::RowVectorXd CX;  // 1 x n
  double q = 1.0;         // diffusivity, > 0
  std::vector<double> abar;  // last companion row of A_z (abar_1..abar_m)

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(abar.size()); }

  /// Companion matrix built from abar.
  Eigen::MatrixXd Az() const;
  /// Canonical input column [0,...,0,1]^T.
  Eigen::VectorXd Bz() const;
  /// Canonical output row [1,0,...,0].
  Eigen::RowVectorXd Cz() const;

  /// Throws std::invalid_argument on inconsistent dimensions, non-finite
  /// entries, or q <= 0.
  void validate() const;
};

/// Uniform space/time discretization.  N intervals (N+1 samples), dx = 1/N.
struct GridSpec {
  int N = 20;
  double dt = 1e-3;
  double t_end = 8.0;

  double dx() const { return 1.0 / N; }
  int points() const { return N + 1; }
  int steps() const;
  std::vector<double> x() const;

  /// Explicit-scheme limit q*dt/dx^2 <= 1/2, N even (full-domain Simpson),
  /// N+1 >= 2m+2 (widest boundary stencil).
  void validate(const PlantConfig& plant) const;
};

/// One time slice of the discretized plant.
struct SimState {
  std::vector<double> u;  // N+1 samples
  Eigen::VectorXd X;      // n
  Eigen::VectorXd Z;      // m
  double t = 0.0;
  double U_applied = 0.0;
};

/// Initial-condition selector.  `baseline` is the bundled reference profile
/// u(x,0) = sin(2*pi*x), X(0) = [u(0,0), 0, ...], Z(0) = [u(1,0), 0, ...];
/// estimator states always start at zero.
struct InitialConditions {
  enum class Kind { Baseline, Zero, Custom };
  struct Term {
    std::string fn;    // "sin" | "cos" | "poly"
    double coef = 0.0;
    double omega = 0.0;  // sin/cos argument scale: coef*fn(omega*x)
    int power = 0;       // poly: coef*x^power
  };
  Kind kind = Kind::Baseline;
  std::vector<Term> u_terms;       // custom profile
  std::vector<double> X0, Z0;      // custom ODE states (optional; default 0)

  double eval_profile(double x) const;
  /// Materialize the plant-side initial state on the grid.  Boundary samples
  /// are overridden to match C_X X(0) and C_z Z(0).
  SimState build(const PlantConfig& plant, const GridSpec& grid) const;

  static InitialConditions baseline();
  static InitialConditions zero();
};

}  // namespace sandwich

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sandwich/kernels.hpp"
#include "sandwich/plant.hpp"

namespace sandwich {

/// Injection gains plus everything sampled on the grid that the estimator
/// update needs.  Immutable after build_observer().
struct ObserverGains {
  Eigen::VectorXd P0;  // n
  Eigen::VectorXd P2;  // m
  std::vector<double> p1_grid;           // p1(x_i) = -vartheta(x_i) P2 - theta(x_i) P0
  Eigen::MatrixXd Abar;                  // composite error matrix, (m+n) x (m+n)
  Eigen::RowVectorXd vartheta_prime0;    // vartheta'(0)
  Eigen::RowVectorXd theta_prime0;       // theta'(0)
  std::vector<Eigen::RowVectorXd> vartheta_grid;  // vartheta(x_i)
  std::vector<Eigen::RowVectorXd> theta_grid;     // theta(x_i)
  std::vector<std::complex<double>> abar_eigs;
  bool pair_observable = true;
};

/// Estimator state; boundary samples track C_X X_hat and C_z Z_hat after
/// every step.
struct ObserverState {
  std::vector<double> u_hat;
  Eigen::VectorXd X_hat;
  Eigen::VectorXd Z_hat;
  double t = 0.0;

  static ObserverState zero(const PlantConfig& plant, const GridSpec& grid);
};

/// Assembles the composite error matrix from the kernel slopes at x = 0 and
/// verifies it is Hurwitz for the supplied gains.  Preconditions checked:
/// neither A nor A_z has an eigenvalue of the form -k^2 pi^2 (else the kernel
/// boundary-value problems are unsolvable), and the pair (A_a, B_a) is
/// observable (reported; fatal only when Abar also fails the Hurwitz test).
ObserverGains build_observer(const PlantConfig& plant, const KernelSet& kernels,
                             const Eigen::VectorXd& P0, const Eigen::VectorXd& P2,
                             const GridSpec& grid);

/// One explicit step: innovation from the shared boundary stencil, ODEs,
/// interior FTCS with the p1 injection, then boundary imposition.  With zero
/// innovation this reproduces the plant update exactly.
ObserverState observer_step(const ObserverState& obs, const ObserverGains& gains,
                            const PlantConfig& plant, const GridSpec& grid,
                            double measured_ux0, double U, int stencil_accuracy);

/// Transformed error field w~(x) = u~(x) + vartheta(x) Z~ + theta(x) X~,
/// which satisfies the plain heat equation with homogeneous ends.
std::vector<double> error_transform(const SimState& plant_state,
                                    const ObserverState& obs_state,
                                    const ObserverGains& gains);

}  // namespace sandwich

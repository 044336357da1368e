#include "sandwich/observer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sandwich/linalg.hpp"
#include "sandwich/stencils.hpp"

namespace sandwich {

ObserverState ObserverState::zero(const PlantConfig& plant, const GridSpec& grid) {
  ObserverState s;
  s.u_hat.assign(static_cast<size_t>(grid.points()), 0.0);
  s.X_hat = Eigen::VectorXd::Zero(plant.n());
  s.Z_hat = Eigen::VectorXd::Zero(plant.m());
  s.t = 0.0;
  return s;
}

ObserverGains build_observer(const PlantConfig& plant, const KernelSet& kernels,
                             const Eigen::VectorXd& P0, const Eigen::VectorXd& P2,
                             const GridSpec& grid) {
  const int n = plant.n(), m = plant.m();
  if (P0.size() != n || P2.size() != m) {
    throw std::invalid_argument("build_observer: P0 must be n-dim, P2 m-dim");
  }
  const int k_max = static_cast<int>(
      std::ceil(std::sqrt(std::max(plant.A.norm(), plant.Az().norm())) /
                std::numbers::pi)) + 1;
  if (linalg::has_eigenvalue_minus_ksq_pisq(plant.A, k_max) ||
      linalg::has_eigenvalue_minus_ksq_pisq(plant.Az(), k_max)) {
    throw std::runtime_error(
        "build_observer: A or A_z has an eigenvalue of the form -k^2*pi^2; "
        "the estimator kernels do not exist");
  }

  ObserverGains g;
  g.P0 = P0;
  g.P2 = P2;
  g.vartheta_prime0 = kernels.vartheta(1, 0.0);
  g.theta_prime0 = kernels.theta(1, 0.0);

  Eigen::MatrixXd a_a = Eigen::MatrixXd::Zero(m + n, m + n);
  a_a.block(0, 0, m, m) = plant.Az();
  a_a.block(m, m, n, n) = plant.A;
  Eigen::RowVectorXd b_a(m + n);
  b_a << g.vartheta_prime0, g.theta_prime0;
  Eigen::VectorXd inj(m + n);
  inj << P2, P0;
  g.Abar = a_a + inj * b_a;
  g.abar_eigs = linalg::eigenvalues(g.Abar);
  g.pair_observable = (linalg::observability_rank(a_a, b_a) == m + n);
  if (!linalg::is_hurwitz(g.Abar)) {
    throw std::runtime_error(
        g.pair_observable
            ? "build_observer: composite error matrix is not Hurwitz for the "
              "supplied gains"
            : "build_observer: composite error matrix is not Hurwitz and the "
              "error pair is unobservable");
  }

  const int pts = grid.points();
  g.p1_grid.resize(static_cast<size_t>(pts));
  g.vartheta_grid.resize(static_cast<size_t>(pts));
  g.theta_grid.resize(static_cast<size_t>(pts));
  for (int i = 0; i < pts; ++i) {
    const double x = static_cast<double>(i) / grid.N;
    g.vartheta_grid[static_cast<size_t>(i)] = kernels.vartheta(0, x);
    g.theta_grid[static_cast<size_t>(i)] = kernels.theta(0, x);
    const double vp2 = g.vartheta_grid[static_cast<size_t>(i)] * P2;
    const double tp0 = g.theta_grid[static_cast<size_t>(i)] * P0;
    g.p1_grid[static_cast<size_t>(i)] = -vp2 - tp0;
  }
  return g;
}

ObserverState observer_step(const ObserverState& obs, const ObserverGains& gains,
                            const PlantConfig& plant, const GridSpec& grid,
                            double measured_ux0, double U, int stencil_accuracy) {
  const double dt = grid.dt;
  const double dx = grid.dx();
  const double r = plant.q * dt / (dx * dx);
  if (r > 0.5 + 1e-12) {
    throw std::runtime_error("observer_step: explicit-scheme stability violated");
  }
  const double uhat_x0 =
      fd::boundary_derivative(obs.u_hat, dx, 1, stencil_accuracy, fd::Side::Left);
  const double eps = measured_ux0 - uhat_x0;

  ObserverState next;
  next.t = obs.t + dt;
  next.X_hat = obs.X_hat +
               dt * (plant.A * obs.X_hat + plant.B * measured_ux0 + gains.P0 * eps);
  next.Z_hat = obs.Z_hat +
               dt * (plant.Az() * obs.Z_hat + plant.Bz() * U + gains.P2 * eps);
  const size_t pts = obs.u_hat.size();
  next.u_hat.resize(pts);
  for (size_t i = 1; i + 1 < pts; ++i) {
    next.u_hat[i] = obs.u_hat[i] +
                    r * (obs.u_hat[i + 1] - 2.0 * obs.u_hat[i] + obs.u_hat[i - 1]) +
                    dt * gains.p1_grid[i] * eps;
  }
  next.u_hat.front() = plant.CX * next.X_hat;
  next.u_hat.back() = plant.Cz() * next.Z_hat;
  return next;
}

std::vector<double> error_transform(const SimState& plant_state,
                                    const ObserverState& obs_state,
                                    const ObserverGains& gains) {
  if (plant_state.u.size() != obs_state.u_hat.size()) {
    throw std::invalid_argument("error_transform: states on different grids");
  }
  const Eigen::VectorXd Zt = plant_state.Z - obs_state.Z_hat;
  const Eigen::VectorXd Xt = plant_state.X - obs_state.X_hat;
  std::vector<double> wt(plant_state.u.size());
  for (size_t i = 0; i < wt.size(); ++i) {
    wt[i] = (plant_state.u[i] - obs_state.u_hat[i]) +
            gains.vartheta_grid[i] * Zt + gains.theta_grid[i] * Xt;
  }
  return wt;
}

}  // namespace sandwich

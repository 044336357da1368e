#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sandwich/plant.hpp"

namespace sandwich {

class ControllerSynthesis;
struct ObserverState;
struct TimeSeries;

namespace diagnostics {

/// Composite state norm (||u||^2 + ||u_x||^2 + |Z|^2 + |X|^2)^{1/2} with
/// Simpson quadrature; u_x by central differences (one-sided at the ends).
double theta_norm(const SimState& state, const GridSpec& grid);

/// Estimator-error norm (sum_{i<=order} ||d^i_x u~||^2 + |Z~|^2 + |X~|^2)^{1/2}.
/// Defaults to order 2; higher orders amplify grid noise and sit behind the
/// caller-supplied flag.
double theta_e_norm(const SimState& plant_state, const ObserverState& obs_state,
                    const GridSpec& grid, int order);

/// Lyapunov-style energy monitor X^T P X + (1/2)||w||^2 + (1/2)||w_x||^2.
double energy_v1(const SimState& state, const GridSpec& grid,
                 const ControllerSynthesis& synthesis);

struct DecayFit {
  double lambda = 0.0;    // -slope of the log-linear fit
  double upsilon = 0.0;   // fitted prefactor at t = 0
  double t0 = 0.0, t1 = 0.0;
  double r_squared = 0.0;
  int samples = 0;
};

/// Least-squares line on log(values) over [t0, t1].  Throws when the window
/// contains nonpositive samples.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& values,
                   double t0, double t1);

/// Convenience: fit over the tail of a recorded series, skipping
/// `transient_skip_fraction` of the horizon.
DecayFit fit_decay_tail(const std::vector<double>& t,
                        const std::vector<double>& values,
                        double transient_skip_fraction = 0.1);

struct ResidualFamily {
  std::string name;
  double max_abs = 0.0;
  double rms = 0.0;
  int samples = 0;
};

struct ResidualReport {
  std::vector<ResidualFamily> families;
  const ResidualFamily* find(const std::string& name) const;
};

/// Residual families over one recorded run: the input-chain boundary
/// identity, the closed chain, the transformed-plant equations, and (when an
/// observer ran) the error-transform checks.
ResidualReport residual_report(const TimeSeries& ts, const PlantConfig& plant,
                               const GridSpec& grid,
                               const ControllerSynthesis* synthesis);

/// Empirical convergence order between a coarse and a dx-halved fine run:
/// log2(coarse/fine) per family.
std::vector<std::pair<std::string, double>> convergence_orders(
    const ResidualReport& coarse, const ResidualReport& fine);

/// m-th time derivative of a dense scalar series by a centered stencil.
double time_derivative(const std::vector<double>& series, int index, int order,
                       double dt);

}  // namespace diagnostics
}  // namespace sandwich

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sandwich/controller.hpp"
#include "sandwich/observer.hpp"
#include "sandwich/plant.hpp"

namespace sandwich {

enum class Mode { OpenLoop, StateFeedback, OutputFeedback };

/// Per-step scalar diagnostics (dense, one row per time step).
struct StepRecord {
  double t = 0.0;
  double theta = 0.0;    // composite state norm
  double theta_e = 0.0;  // estimator-error norm (observer modes)
  double U = 0.0;        // input applied over the step starting at t
  double ux0 = 0.0;      // boundary measurement
  double w0_abs = 0.0;   // |w(0,t)| (when a synthesis is available)
  double w1 = 0.0;       // w(1,t)
  double wterr0 = 0.0;   // |w~(0,t)| (observer modes)
  double wterr1 = 0.0;   // |w~(1,t)|
  double x_norm = 0.0;
  double z_norm = 0.0;
  Eigen::VectorXd X, Z;
};

/// Sparse (stride-sampled) field snapshots plus the residual probes that need
/// whole-field data.  `*_next` holds the field one step later so forward time
/// differences use the true step size.
struct FieldRecord {
  int step = 0;
  double t = 0.0;
  std::vector<double> u, u_hat, u_err;
  std::vector<double> w, w_next;
  std::vector<double> w_err, w_err_next;
  double rhs_boundary_identity = 0.0;  // B w(1) + C w(0) - int D w + E X + U
  double rhs_closed_chain = 0.0;       // -int D w + E X - sum(...) d_t^i w(1)
  double wx0 = 0.0;                    // w_x(0,t)
  double V1 = 0.0;                     // optional energy monitor
};

struct TimeSeries {
  Mode mode = Mode::OpenLoop;
  std::vector<StepRecord> steps;
  std::vector<FieldRecord> fields;
  bool diverged = false;
  double diverged_at = 0.0;
  bool has_synthesis_diagnostics = false;
  bool has_observer = false;
  int theta_e_order = 2;
};

struct RunOptions {
  int snapshot_stride = 50;
  bool energy_monitor = false;
  int theta_e_order = 2;  // spatial-derivative orders included in theta_e
};

/// One explicit step of the plant: boundary measurement from the current
/// field, ODE updates, FTCS interior, then boundary imposition.
SimState plant_step(const SimState& s, const PlantConfig& plant,
                    const GridSpec& grid, double U, int stencil_accuracy);

/// Integrate to t_end.  The input applied over [t_j, t_{j+1}) is computed
/// from the states at t_{j-1} (one-step-delayed coupling); U at t_0 is
/// evaluated on the initial states.  Divergence (|value| > 1e9) stops the run
/// with a partial series rather than erroring.
TimeSeries run_scenario(const PlantConfig& plant, const GridSpec& grid,
                        const InitialConditions& init, Mode mode,
                        const ControllerSynthesis* synthesis,
                        const ObserverGains* observer, const RunOptions& options);

}  // namespace sandwich

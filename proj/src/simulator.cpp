#include "sandwich/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "sandwich/diagnostics.hpp"
#include "sandwich/stencils.hpp"

namespace sandwich {

namespace {
constexpr double kDivergenceLimit = 1e9;

bool state_diverged(const SimState& s) {
  for (double v : s.u) {
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit) return true;
  }
  return !s.X.allFinite() || s.X.cwiseAbs().maxCoeff() > kDivergenceLimit ||
         !s.Z.allFinite() || s.Z.cwiseAbs().maxCoeff() > kDivergenceLimit;
}
}  // namespace

SimState plant_step(const SimState& s, const PlantConfig& plant,
                    const GridSpec& grid, double U, int stencil_accuracy) {
  const double dt = grid.dt;
  const double dx = grid.dx();
  const double r = plant.q * dt / (dx * dx);
  if (r > 0.5 + 1e-12) {
    throw std::runtime_error("plant_step: explicit-scheme stability violated");
  }
  const double ux0 =
      fd::boundary_derivative(s.u, dx, 1, stencil_accuracy, fd::Side::Left);

  SimState next;
  next.t = s.t + dt;
  next.U_applied = U;
  next.X = s.X + dt * (plant.A * s.X + plant.B * ux0);
  next.Z = s.Z + dt * (plant.Az() * s.Z + plant.Bz() * U);
  const size_t pts = s.u.size();
  next.u.resize(pts);
  for (size_t i = 1; i + 1 < pts; ++i) {
    next.u[i] = s.u[i] + r * (s.u[i + 1] - 2.0 * s.u[i] + s.u[i - 1]);
  }
  next.u.front() = plant.CX * next.X;
  next.u.back() = plant.Cz() * next.Z;
  return next;
}

TimeSeries run_scenario(const PlantConfig& plant, const GridSpec& grid,
                        const InitialConditions& init, Mode mode,
                        const ControllerSynthesis* synthesis,
                        const ObserverGains* observer, const RunOptions& options) {
  plant.validate();
  grid.validate(plant);
  if (mode != Mode::OpenLoop && synthesis == nullptr) {
    throw std::invalid_argument("run_scenario: feedback modes need a synthesis");
  }
  if (mode == Mode::OutputFeedback && observer == nullptr) {
    throw std::invalid_argument("run_scenario: output feedback needs an observer");
  }
  const int acc = synthesis ? synthesis->stencil_accuracy() : 1;

  TimeSeries ts;
  ts.mode = mode;
  ts.has_synthesis_diagnostics = (synthesis != nullptr);
  ts.has_observer = (mode == Mode::OutputFeedback);
  ts.theta_e_order = options.theta_e_order;

  SimState state = init.build(plant, grid);
  ObserverState obs;
  if (ts.has_observer) obs = ObserverState::zero(plant, grid);

  const auto control = [&](const SimState& plant_state,
                           const ObserverState& obs_state) -> double {
    switch (mode) {
      case Mode::OpenLoop:
        return 0.0;
      case Mode::StateFeedback:
        return synthesis->state_feedback_U(plant_state.u, plant_state.X);
      case Mode::OutputFeedback:
        return synthesis->output_feedback_U(obs_state.u_hat, obs_state.X_hat);
    }
    return 0.0;
  };

  const int steps = grid.steps();
  ts.steps.reserve(static_cast<size_t>(steps) + 1);
  const auto record_step = [&](const SimState& st, const ObserverState& ob,
                               double U_applied) {
    StepRecord r;
    r.t = st.t;
    r.U = U_applied;
    r.theta = diagnostics::theta_norm(st, grid);
    r.ux0 = fd::boundary_derivative(st.u, grid.dx(), 1, acc, fd::Side::Left);
    r.x_norm = st.X.norm();
    r.z_norm = st.Z.norm();
    r.X = st.X;
    r.Z = st.Z;
    if (synthesis) {
      r.w0_abs = std::abs(synthesis->w_at_left(st.u, st.X));
      r.w1 = synthesis->w_at_right(st.u, st.X);
    }
    if (ts.has_observer) {
      r.theta_e = diagnostics::theta_e_norm(st, ob, grid, options.theta_e_order);
      const auto wt = error_transform(st, ob, *observer);
      r.wterr0 = std::abs(wt.front());
      r.wterr1 = std::abs(wt.back());
    }
    ts.steps.push_back(std::move(r));
  };

  const auto record_fields = [&](int step_idx, const SimState& st,
                                 const ObserverState& ob, double U_applied,
                                 const SimState& st_next,
                                 const ObserverState& ob_next) {
    FieldRecord fr;
    fr.step = step_idx;
    fr.t = st.t;
    fr.u = st.u;
    if (ts.has_observer) {
      fr.u_hat = ob.u_hat;
      fr.u_err.resize(st.u.size());
      for (size_t i = 0; i < st.u.size(); ++i) fr.u_err[i] = st.u[i] - ob.u_hat[i];
      fr.w_err = error_transform(st, ob, *observer);
      fr.w_err_next = error_transform(st_next, ob_next, *observer);
    }
    if (synthesis) {
      fr.w = synthesis->w_grid(st.u, st.X);
      fr.w_next = synthesis->w_grid(st_next.u, st_next.X);
      fr.rhs_boundary_identity =
          synthesis->boundary_identity_rhs(st.u, st.X, U_applied);
      fr.rhs_closed_chain = synthesis->closed_chain_rhs(st.u, st.X);
      fr.wx0 = synthesis->w_boundary_stacks(st.u, st.X).left[1];
      if (options.energy_monitor) {
        fr.V1 = diagnostics::energy_v1(st, grid, *synthesis);
      }
    }
    ts.fields.push_back(std::move(fr));
  };

  // U(t_0) has no earlier state to come from; evaluate it on the initial data.
  double U_applied = control(state, obs);
  record_step(state, obs, U_applied);

  for (int j = 0; j < steps; ++j) {
    // states at t_j determine the input applied from t_{j+1}
    const double U_next = control(state, obs);
    const double measured_ux0 =
        fd::boundary_derivative(state.u, grid.dx(), 1, acc, fd::Side::Left);

    SimState next = plant_step(state, plant, grid, U_applied, acc);
    ObserverState obs_next;
    if (ts.has_observer) {
      obs_next = observer_step(obs, *observer, plant, grid, measured_ux0,
                               U_applied, acc);
    }

    if (j % options.snapshot_stride == 0) {
      record_fields(j, state, obs, U_applied, next, obs_next);
    }

    state = std::move(next);
    obs = std::move(obs_next);
    U_applied = U_next;
    record_step(state, obs, U_applied);

    if (state_diverged(state)) {
      ts.diverged = true;
      ts.diverged_at = state.t;
      break;
    }
  }
  return ts;
}

}  // namespace sandwich

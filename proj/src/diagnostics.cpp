#include "sandwich/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "sandwich/controller.hpp"
#include "sandwich/observer.hpp"
#include "sandwich/quadrature.hpp"
#include "sandwich/simulator.hpp"
#include "sandwich/stencils.hpp"

namespace sandwich::diagnostics {

namespace {

double l2_norm_sq(const std::vector<double>& f, double h) {
  std::vector<double> sq(f.size());
  for (size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return quad::simpson(sq, h);
}

}  // namespace

double theta_norm(const SimState& state, const GridSpec& grid) {
  const double h = grid.dx();
  const auto ux = fd::gradient(state.u, h);
  const double v = l2_norm_sq(state.u, h) + l2_norm_sq(ux, h) +
                   state.Z.squaredNorm() + state.X.squaredNorm();
  return std::sqrt(v);
}

double theta_e_norm(const SimState& plant_state, const ObserverState& obs_state,
                    const GridSpec& grid, int order) {
  if (order < 0) throw std::invalid_argument("theta_e_norm: negative order");
  const double h = grid.dx();
  std::vector<double> err(plant_state.u.size());
  for (size_t i = 0; i < err.size(); ++i) {
    err[i] = plant_state.u[i] - obs_state.u_hat[i];
  }
  double v = (plant_state.Z - obs_state.Z_hat).squaredNorm() +
             (plant_state.X - obs_state.X_hat).squaredNorm();
  std::vector<double> d = err;
  v += l2_norm_sq(d, h);
  for (int k = 1; k <= order; ++k) {
    d = fd::gradient(d, h);
    v += l2_norm_sq(d, h);
  }
  return std::sqrt(v);
}

double energy_v1(const SimState& state, const GridSpec& grid,
                 const ControllerSynthesis& synthesis) {
  const auto w = synthesis.w_grid(state.u, state.X);
  const auto wx = fd::gradient(w, grid.dx());
  const double quad_part =
      0.5 * l2_norm_sq(w, grid.dx()) + 0.5 * l2_norm_sq(wx, grid.dx());
  return state.X.dot(synthesis.lyapunov_P() * state.X) + quad_part;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& values,
                   double t0, double t1) {
  if (t.size() != values.size()) {
    throw std::invalid_argument("fit_decay: series length mismatch");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    if (!(values[i] > 0.0)) {
      throw std::runtime_error("fit_decay: nonpositive sample inside the window");
    }
    const double y = std::log(values[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    ++n;
  }
  if (n < 2) throw std::runtime_error("fit_decay: fewer than two samples in window");
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    const double y = std::log(values[i]);
    const double fit = intercept + slope * t[i];
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean) * (y - mean);
  }
  DecayFit out;
  out.lambda = -slope;
  out.upsilon = std::exp(intercept);
  out.t0 = t0;
  out.t1 = t1;
  out.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  out.samples = n;
  return out;
}

DecayFit fit_decay_tail(const std::vector<double>& t,
                        const std::vector<double>& values,
                        double transient_skip_fraction) {
  if (t.empty()) throw std::invalid_argument("fit_decay_tail: empty series");
  const double t_end = t.back();
  return fit_decay(t, values, t.front() + transient_skip_fraction * (t_end - t.front()),
                   t_end);
}

double time_derivative(const std::vector<double>& series, int index, int order,
                       double dt) {
  if (order == 0) return series[static_cast<size_t>(index)];
  const int k = (order + 1) / 2 + (order % 2 == 0 ? 1 : 0);
  // symmetric window of 2k+1 nodes
  if (index - k < 0 || index + k >= static_cast<int>(series.size())) {
    throw std::out_of_range("time_derivative: window leaves the series");
  }
  std::vector<double> nodes(static_cast<size_t>(2 * k) + 1);
  for (int i = -k; i <= k; ++i) nodes[static_cast<size_t>(i + k)] = i * dt;
  const auto w = fd::fornberg_weights(0.0, nodes, order);
  double v = 0.0;
  for (int i = -k; i <= k; ++i) {
    v += w[static_cast<size_t>(i + k)] * series[static_cast<size_t>(index + i)];
  }
  return v;
}

const ResidualFamily* ResidualReport::find(const std::string& name) const {
  for (const auto& f : families) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

ResidualFamily summarize(std::string name, const std::vector<double>& abs_vals) {
  ResidualFamily f;
  f.name = std::move(name);
  f.samples = static_cast<int>(abs_vals.size());
  double ssq = 0.0;
  for (double v : abs_vals) {
    f.max_abs = std::max(f.max_abs, v);
    ssq += v * v;
  }
  f.rms = abs_vals.empty() ? 0.0 : std::sqrt(ssq / abs_vals.size());
  return f;
}

}  // namespace

ResidualReport residual_report(const TimeSeries& ts, const PlantConfig& plant,
                               const GridSpec& grid,
                               const ControllerSynthesis* synthesis) {
  ResidualReport rep;
  const double dt = grid.dt;
  const double dx = grid.dx();
  const int m = plant.m();
  const int dense = static_cast<int>(ts.steps.size());

  if (synthesis && ts.has_synthesis_diagnostics) {
    std::vector<double> w1(static_cast<size_t>(dense));
    for (int j = 0; j < dense; ++j) w1[static_cast<size_t>(j)] = ts.steps[static_cast<size_t>(j)].w1;

    std::vector<double> r_ident, r_chain, r_target1, r_heat, r_w0;
    for (const auto& fr : ts.fields) {
      const int j = fr.step;
      const int k = (m + 1) / 2 + (m % 2 == 0 ? 1 : 0);
      if (j - k >= 0 && j + k < dense && !fr.w.empty()) {
        const double dtm = time_derivative(w1, j, m, dt);
        r_ident.push_back(std::abs(dtm - fr.rhs_boundary_identity));
        r_chain.push_back(std::abs(dtm - fr.rhs_closed_chain));
      }
      if (j + 1 < dense && !fr.w.empty()) {
        // X update vs the transformed-plant ODE
        const Eigen::VectorXd xdot =
            (ts.steps[static_cast<size_t>(j + 1)].X - ts.steps[static_cast<size_t>(j)].X) / dt;
        const Eigen::MatrixXd a_cl = plant.A + plant.B * synthesis->gains().K;
        const Eigen::VectorXd rhs =
            a_cl * ts.steps[static_cast<size_t>(j)].X + plant.B * fr.wx0;
        r_target1.push_back((xdot - rhs).norm());
        // interior heat residual of w
        for (size_t i = 1; i + 1 < fr.w.size(); ++i) {
          const double wt = (fr.w_next[i] - fr.w[i]) / dt;
          const double wxx = (fr.w[i + 1] - 2.0 * fr.w[i] + fr.w[i - 1]) / (dx * dx);
          r_heat.push_back(std::abs(wt - plant.q * wxx));
        }
      }
    }
    for (const auto& sr : ts.steps) r_w0.push_back(sr.w0_abs);
    rep.families.push_back(summarize("boundary_identity", r_ident));
    rep.families.push_back(summarize("closed_chain", r_chain));
    rep.families.push_back(summarize("target_ode", r_target1));
    rep.families.push_back(summarize("target_heat", r_heat));
    rep.families.push_back(summarize("w_left_boundary", r_w0));
  }

  if (ts.has_observer) {
    std::vector<double> r_heat_err, r_bc;
    for (const auto& fr : ts.fields) {
      if (fr.w_err.empty() || fr.w_err_next.empty()) continue;
      for (size_t i = 1; i + 1 < fr.w_err.size(); ++i) {
        const double wt = (fr.w_err_next[i] - fr.w_err[i]) / dt;
        const double wxx =
            (fr.w_err[i + 1] - 2.0 * fr.w_err[i] + fr.w_err[i - 1]) / (dx * dx);
        r_heat_err.push_back(std::abs(wt - plant.q * wxx));
      }
    }
    for (const auto& sr : ts.steps) {
      r_bc.push_back(sr.wterr0);
      r_bc.push_back(sr.wterr1);
    }
    rep.families.push_back(summarize("error_heat", r_heat_err));
    rep.families.push_back(summarize("error_boundaries", r_bc));
  }
  return rep;
}

std::vector<std::pair<std::string, double>> convergence_orders(
    const ResidualReport& coarse, const ResidualReport& fine) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& fc : coarse.families) {
    const ResidualFamily* ff = fine.find(fc.name);
    if (!ff || fc.max_abs <= 0.0 || ff->max_abs <= 0.0) continue;
    out.emplace_back(fc.name, std::log2(fc.max_abs / ff->max_abs));
  }
  return out;
}

}  // namespace sandwich::diagnostics

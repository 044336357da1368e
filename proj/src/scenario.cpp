#include "sandwich/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "sandwich/diagnostics.hpp"
#include "sandwich/linalg.hpp"

namespace sandwich {

namespace {

constexpr const char* kVersion = "sandwichctl 1.0.0";

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

nlohmann::json rowvec_to_json(const Eigen::RowVectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json eigs_to_json(const std::vector<std::complex<double>>& evs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : evs) a.push_back({e.real(), e.imag()});
  return a;
}

const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                              const std::string& ctx) {
  if (!j.contains(key)) {
    throw ScenarioError(ErrorCode::Config, "config: missing '" + ctx + "." + key + "'");
  }
  return j.at(key);
}

Eigen::VectorXd parse_vector(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array()) throw ScenarioError(ErrorCode::Config, "config: '" + ctx + "' must be an array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ScenarioError(ErrorCode::Config, "config: '" + ctx + "' must be numeric");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ScenarioError(ErrorCode::Config, "config: '" + ctx + "' must be a list of rows");
  }
  const size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ScenarioError(ErrorCode::Config, "config: ragged matrix in '" + ctx + "'");
    }
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ScenarioError(ErrorCode::Config, "config: '" + ctx + "' must be numeric");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace

Mode mode_from_string(const std::string& s) {
  if (s == "open_loop") return Mode::OpenLoop;
  if (s == "state_feedback") return Mode::StateFeedback;
  if (s == "output_feedback") return Mode::OutputFeedback;
  throw ScenarioError(ErrorCode::Config, "config: unknown mode '" + s + "'");
}

std::string mode_to_string(Mode m) {
  switch (m) {
    case Mode::OpenLoop: return "open_loop";
    case Mode::StateFeedback: return "state_feedback";
    case Mode::OutputFeedback: return "output_feedback";
  }
  return "open_loop";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

ScenarioFile ScenarioFile::from_json(const nlohmann::json& j) {
  ScenarioFile sc;
  const auto& plant = require(j, "plant", "");
  sc.plant.A = parse_matrix(require(plant, "A", "plant"), "plant.A");
  sc.plant.B = parse_vector(require(plant, "B", "plant"), "plant.B");
  const Eigen::VectorXd cx = parse_vector(require(plant, "C_X", "plant"), "plant.C_X");
  sc.plant.CX = cx.transpose();
  sc.plant.q = require(plant, "q", "plant").get<double>();
  const Eigen::VectorXd ab = parse_vector(require(plant, "abar", "plant"), "plant.abar");
  sc.plant.abar.assign(ab.data(), ab.data() + ab.size());

  const auto& grid = require(j, "grid", "");
  sc.grid.N = require(grid, "N", "grid").get<int>();
  sc.grid.dt = require(grid, "dt", "grid").get<double>();
  sc.grid.t_end = require(grid, "t_end", "grid").get<double>();

  const auto& gains = require(j, "gains", "");
  const Eigen::VectorXd k = parse_vector(require(gains, "K", "gains"), "gains.K");
  sc.gains.K = k.transpose();
  const Eigen::VectorXd c = parse_vector(require(gains, "c", "gains"), "gains.c");
  sc.gains.c.assign(c.data(), c.data() + c.size());
  sc.gains.P0 = parse_vector(require(gains, "P0", "gains"), "gains.P0");
  sc.gains.P2 = parse_vector(require(gains, "P2", "gains"), "gains.P2");

  sc.mode = mode_from_string(require(j, "mode", "").get<std::string>());

  const auto& init = require(j, "initial", "");
  const std::string kind = require(init, "type", "initial").get<std::string>();
  if (kind == "baseline") {
    sc.initial = InitialConditions::baseline();
  } else if (kind == "zero") {
    sc.initial = InitialConditions::zero();
  } else if (kind == "custom") {
    sc.initial.kind = InitialConditions::Kind::Custom;
    for (const auto& tj : require(init, "u_terms", "initial")) {
      InitialConditions::Term t;
      t.fn = require(tj, "fn", "initial.u_terms").get<std::string>();
      if (t.fn != "sin" && t.fn != "cos" && t.fn != "poly") {
        throw ScenarioError(ErrorCode::Config,
                            "config: initial term fn must be sin|cos|poly");
      }
      t.coef = require(tj, "coef", "initial.u_terms").get<double>();
      if (t.fn == "poly") {
        t.power = require(tj, "power", "initial.u_terms").get<int>();
      } else {
        t.omega = require(tj, "omega", "initial.u_terms").get<double>();
      }
      sc.initial.u_terms.push_back(t);
    }
    if (init.contains("X0")) {
      for (const auto& v : init.at("X0")) sc.initial.X0.push_back(v.get<double>());
    }
    if (init.contains("Z0")) {
      for (const auto& v : init.at("Z0")) sc.initial.Z0.push_back(v.get<double>());
    }
  } else {
    throw ScenarioError(ErrorCode::Config, "config: initial.type must be baseline|zero|custom");
  }

  if (j.contains("output")) {
    const auto& out = j.at("output");
    if (out.contains("snapshot_stride")) sc.output.snapshot_stride = out.at("snapshot_stride").get<int>();
    if (out.contains("energy")) sc.output.energy_monitor = out.at("energy").get<bool>();
    if (out.contains("theta_e_order")) sc.output.theta_e_order = out.at("theta_e_order").get<int>();
  }
  if (j.contains("stencil_accuracy")) {
    sc.stencil_accuracy = j.at("stencil_accuracy").get<int>();
  }

  if (sc.output.snapshot_stride < 1) {
    throw ScenarioError(ErrorCode::Config, "config: snapshot_stride must be >= 1");
  }
  if (sc.output.theta_e_order < 0 || sc.output.theta_e_order > 2 * sc.plant.m()) {
    throw ScenarioError(ErrorCode::Config, "config: theta_e_order must be within 0..2m");
  }
  try {
    sc.plant.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(ErrorCode::Config, std::string("config: ") + e.what());
  }
  const double ratio = sc.plant.q * sc.grid.dt / (sc.grid.dx() * sc.grid.dx());
  if (ratio > 0.5 + 1e-12) {
    throw ScenarioError(ErrorCode::Stability,
                        "config: explicit-scheme stability violated (q*dt/dx^2 = " +
                            format_double(ratio) + " > 1/2)");
  }
  try {
    sc.grid.validate(sc.plant);
  } catch (const std::exception& e) {
    throw ScenarioError(ErrorCode::Config, std::string("config: ") + e.what());
  }
  if (static_cast<int>(sc.gains.c.size()) != sc.plant.m() ||
      sc.gains.K.size() != sc.plant.n() || sc.gains.P0.size() != sc.plant.n() ||
      sc.gains.P2.size() != sc.plant.m()) {
    throw ScenarioError(ErrorCode::Config, "config: gain dimensions inconsistent with plant");
  }
  return sc;
}

ScenarioFile ScenarioFile::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ScenarioError(ErrorCode::Io, "cannot open config file: " + file.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ScenarioError(ErrorCode::Config, std::string("config: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json ScenarioFile::to_json() const {
  nlohmann::json j;
  j["plant"]["A"] = mat_to_json(plant.A);
  j["plant"]["B"] = vec_to_json(plant.B);
  j["plant"]["C_X"] = rowvec_to_json(plant.CX);
  j["plant"]["q"] = plant.q;
  j["plant"]["abar"] = plant.abar;
  j["grid"]["N"] = grid.N;
  j["grid"]["dt"] = grid.dt;
  j["grid"]["t_end"] = grid.t_end;
  j["gains"]["K"] = rowvec_to_json(gains.K);
  j["gains"]["c"] = gains.c;
  j["gains"]["P0"] = vec_to_json(gains.P0);
  j["gains"]["P2"] = vec_to_json(gains.P2);
  j["mode"] = mode_to_string(mode);
  switch (initial.kind) {
    case InitialConditions::Kind::Baseline:
      j["initial"]["type"] = "baseline";
      break;
    case InitialConditions::Kind::Zero:
      j["initial"]["type"] = "zero";
      break;
    case InitialConditions::Kind::Custom: {
      j["initial"]["type"] = "custom";
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : initial.u_terms) {
        nlohmann::json tj;
        tj["fn"] = t.fn;
        tj["coef"] = t.coef;
        if (t.fn == "poly") {
          tj["power"] = t.power;
        } else {
          tj["omega"] = t.omega;
        }
        terms.push_back(tj);
      }
      j["initial"]["u_terms"] = terms;
      if (!initial.X0.empty()) j["initial"]["X0"] = initial.X0;
      if (!initial.Z0.empty()) j["initial"]["Z0"] = initial.Z0;
      break;
    }
  }
  j["output"]["snapshot_stride"] = output.snapshot_stride;
  j["output"]["energy"] = output.energy_monitor;
  j["output"]["theta_e_order"] = output.theta_e_order;
  j["stencil_accuracy"] = stencil_accuracy;
  return j;
}

ScenarioFile ScenarioFile::baseline() {
  ScenarioFile sc;
  sc.plant.A.resize(2, 2);
  sc.plant.A << 1.0, 1.0, 1.0, 0.5;
  sc.plant.B.resize(2);
  sc.plant.B << 0.0, 1.0;
  sc.plant.CX.resize(2);
  sc.plant.CX << 1.0, 0.0;
  sc.plant.q = 1.0;
  sc.plant.abar = {1.0, 1.0};
  sc.grid.N = 20;
  sc.grid.dt = 1e-3;
  sc.grid.t_end = 8.0;
  sc.gains.K.resize(2);
  sc.gains.K << -10.0, -5.0;
  sc.gains.c = {3.0, 3.0};
  sc.gains.P0.resize(2);
  sc.gains.P0 << -2.0, -4.0;
  sc.gains.P2.resize(2);
  sc.gains.P2 << -4.0, -12.0;
  sc.mode = Mode::OutputFeedback;
  sc.initial = InitialConditions::baseline();
  sc.output.snapshot_stride = 50;
  sc.stencil_accuracy = 1;
  return sc;
}

RunArtifacts execute_scenario(const ScenarioFile& sc) {
  RunArtifacts out;
  std::unique_ptr<ControllerSynthesis> synth;
  std::unique_ptr<ObserverGains> obs;
  std::string open_loop_synth_note;
  try {
    synth = std::make_unique<ControllerSynthesis>(ControllerSynthesis::synthesize(
        sc.plant, sc.grid, sc.gains, sc.stencil_accuracy));
  } catch (const std::exception& e) {
    if (sc.mode != Mode::OpenLoop) {
      throw ScenarioError(ErrorCode::Synthesis, std::string("synthesis: ") + e.what());
    }
    open_loop_synth_note = e.what();  // open loop proceeds without w-diagnostics
  }
  if (sc.mode == Mode::OutputFeedback) {
    try {
      obs = std::make_unique<ObserverGains>(build_observer(
          sc.plant, synth->kernels(), sc.gains.P0, sc.gains.P2, sc.grid));
    } catch (const std::exception& e) {
      throw ScenarioError(ErrorCode::Synthesis, std::string("observer: ") + e.what());
    }
  }

  out.series = run_scenario(sc.plant, sc.grid, sc.initial, sc.mode, synth.get(),
                            obs.get(), sc.output);
  if (synth) out.synthesis_report = synth->report();

  nlohmann::json& rep = out.report;
  rep["version"] = kVersion;
  rep["scenario"] = sc.to_json();
  rep["diverged"] = out.series.diverged;
  if (out.series.diverged) rep["diverged_at"] = out.series.diverged_at;

  if (synth) {
    const auto& sr = synth->report();
    nlohmann::json s;
    s["eig_A_BK"] = eigs_to_json(sr.eig_A_BK);
    s["hurwitz_margin"] = sr.hurwitz_margin;
    s["cond_G"] = sr.cond_G;
    s["cond_G1"] = sr.cond_G1;
    s["gamma_sign"] = sr.gamma_sign;
    s["alpha"] = sr.alpha;
    s["beta"] = sr.beta;
    s["chain_poly"] = sr.chain_poly;
    s["chain_poly_hurwitz"] = sr.chain_poly_hurwitz;
    s["warnings"] = sr.warnings;
    s["operators"]["B"] = synth->operators().B.deriv_coeffs;
    s["operators"]["C"] = synth->operators().C.deriv_coeffs;
    s["operators"]["L"] = synth->L().deriv_coeffs;
    s["operators"]["Fbar"] = synth->Fbar().deriv_coeffs;
    s["operators"]["E"] = rowvec_to_json(synth->operators().E.state_gain);
    s["operators"]["D_samples"] = synth->operators().D.integral_kernel;
    rep["synthesis"] = s;
  } else if (!open_loop_synth_note.empty()) {
    rep["synthesis_skipped"] = open_loop_synth_note;
  }
  if (obs) {
    nlohmann::json o;
    o["Abar"] = mat_to_json(obs->Abar);
    o["Abar_eigs"] = eigs_to_json(obs->abar_eigs);
    o["vartheta_prime0"] = rowvec_to_json(obs->vartheta_prime0);
    o["theta_prime0"] = rowvec_to_json(obs->theta_prime0);
    o["p1_samples"] = obs->p1_grid;
    o["pair_observable"] = obs->pair_observable;
    rep["observer"] = o;
  }

  // decay fits over the dense series
  std::vector<double> t, theta, theta_e;
  for (const auto& s : out.series.steps) {
    t.push_back(s.t);
    theta.push_back(s.theta);
    if (out.series.has_observer) theta_e.push_back(s.theta_e);
  }
  const auto fit_json = [](const diagnostics::DecayFit& f) {
    nlohmann::json j;
    j["lambda"] = f.lambda;
    j["upsilon"] = f.upsilon;
    j["window"] = {f.t0, f.t1};
    j["r_squared"] = f.r_squared;
    j["samples"] = f.samples;
    return j;
  };
  try {
    rep["decay_fit"]["theta"] = fit_json(diagnostics::fit_decay_tail(t, theta));
  } catch (const std::exception&) {
    rep["decay_fit"]["theta"] = nullptr;
  }
  if (out.series.has_observer) {
    try {
      rep["decay_fit"]["theta_e"] = fit_json(diagnostics::fit_decay_tail(t, theta_e));
    } catch (const std::exception&) {
      rep["decay_fit"]["theta_e"] = nullptr;
    }
  }

  const auto resid = diagnostics::residual_report(out.series, sc.plant, sc.grid,
                                                  synth.get());
  nlohmann::json rj = nlohmann::json::array();
  for (const auto& f : resid.families) {
    nlohmann::json fj;
    fj["name"] = f.name;
    fj["max_abs"] = f.max_abs;
    fj["rms"] = f.rms;
    fj["samples"] = f.samples;
    rj.push_back(fj);
  }
  rep["residuals"] = rj;

  double theta_max = 0.0, u_max = 0.0;
  for (const auto& s : out.series.steps) {
    theta_max = std::max(theta_max, s.theta);
    u_max = std::max(u_max, std::abs(s.U));
  }
  rep["summary"]["theta_initial"] = out.series.steps.front().theta;
  rep["summary"]["theta_final"] = out.series.steps.back().theta;
  rep["summary"]["theta_max"] = theta_max;
  rep["summary"]["U_final_abs"] = std::abs(out.series.steps.back().U);
  rep["summary"]["U_max_abs"] = u_max;
  return out;
}

namespace {

void write_field_csv(const std::filesystem::path& file, const GridSpec& grid,
                     const TimeSeries& ts,
                     const std::vector<double> FieldRecord::*member) {
  std::ofstream os(file);
  if (!os) throw ScenarioError(ErrorCode::Io, "cannot write " + file.string());
  os << "t";
  for (int i = 0; i <= grid.N; ++i) os << ",x=" << format_double(i * grid.dx());
  os << "\n";
  for (const auto& fr : ts.fields) {
    const auto& field = fr.*member;
    if (field.empty()) continue;
    os << format_double(fr.t);
    for (double v : field) os << "," << format_double(v);
    os << "\n";
  }
}

}  // namespace

void write_run(const RunArtifacts& artifacts, const ScenarioFile& sc,
               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ScenarioError(ErrorCode::Io, "cannot create " + dir.string());
  const TimeSeries& ts = artifacts.series;

  {
    std::ofstream os(dir / "timeseries.csv");
    if (!os) throw ScenarioError(ErrorCode::Io, "cannot write timeseries.csv");
    os << "t,theta,U,ux0,x_norm,z_norm";
    if (ts.has_synthesis_diagnostics) os << ",w0_abs,w1";
    if (ts.has_observer) os << ",theta_e,wterr0,wterr1";
    os << "\n";
    for (const auto& s : ts.steps) {
      os << format_double(s.t) << "," << format_double(s.theta) << ","
         << format_double(s.U) << "," << format_double(s.ux0) << ","
         << format_double(s.x_norm) << "," << format_double(s.z_norm);
      if (ts.has_synthesis_diagnostics) {
        os << "," << format_double(s.w0_abs) << "," << format_double(s.w1);
      }
      if (ts.has_observer) {
        os << "," << format_double(s.theta_e) << "," << format_double(s.wterr0)
           << "," << format_double(s.wterr1);
      }
      os << "\n";
    }
  }

  write_field_csv(dir / "u_field.csv", sc.grid, ts, &FieldRecord::u);
  if (ts.has_observer) {
    write_field_csv(dir / "uhat_field.csv", sc.grid, ts, &FieldRecord::u_hat);
    write_field_csv(dir / "error_field.csv", sc.grid, ts, &FieldRecord::u_err);
  }

  std::ofstream os(dir / "report.json");
  if (!os) throw ScenarioError(ErrorCode::Io, "cannot write report.json");
  os << artifacts.report.dump(2) << "\n";
}

}  // namespace sandwich

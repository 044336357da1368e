// Command-line driver: simulate / synthesize / verify / sweep.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "sandwich/scenario.hpp"
#include "sandwich/verify.hpp"

namespace fs = std::filesystem;
using sandwich::ErrorCode;
using sandwich::ScenarioError;
using sandwich::ScenarioFile;

namespace {

int error_exit(ErrorCode code, const std::string& what) {
  nlohmann::json err;
  err["error"]["code"] = static_cast<int>(code);
  err["error"]["message"] = what;
  std::cerr << err.dump() << "\n";
  return static_cast<int>(code);
}

ScenarioFile load_config(const std::string& path, const std::string& mode_override) {
  ScenarioFile sc = (path == "baseline") ? ScenarioFile::baseline()
                                         : ScenarioFile::load(path);
  if (!mode_override.empty()) sc.mode = sandwich::mode_from_string(mode_override);
  return sc;
}

int cmd_simulate(const std::string& config, const std::string& mode,
                 const std::string& out_dir) {
  const ScenarioFile sc = load_config(config, mode);
  const auto artifacts = sandwich::execute_scenario(sc);
  sandwich::write_run(artifacts, sc, out_dir);
  std::cout << "wrote " << out_dir << " ("
            << artifacts.series.steps.size() << " steps"
            << (artifacts.series.diverged ? ", diverged" : "") << ")\n";
  return 0;
}

int cmd_synthesize(const std::string& config, const std::string& out_file,
                   const std::string& kernel_dump) {
  ScenarioFile sc = load_config(config, "");
  const auto synth = sandwich::ControllerSynthesis::synthesize(
      sc.plant, sc.grid, sc.gains, sc.stencil_accuracy);
  nlohmann::json rep;
  rep["scenario"] = sc.to_json();
  const auto& sr = synth.report();
  rep["eig_A_BK"] = nlohmann::json::array();
  for (const auto& e : sr.eig_A_BK) rep["eig_A_BK"].push_back({e.real(), e.imag()});
  rep["hurwitz_margin"] = sr.hurwitz_margin;
  rep["cond_G"] = sr.cond_G;
  rep["cond_G1"] = sr.cond_G1;
  rep["gamma_sign"] = sr.gamma_sign;
  rep["alpha"] = sr.alpha;
  rep["beta"] = sr.beta;
  rep["chain_poly"] = sr.chain_poly;
  rep["chain_poly_hurwitz"] = sr.chain_poly_hurwitz;
  rep["warnings"] = sr.warnings;
  rep["operators"]["B"] = synth.operators().B.deriv_coeffs;
  rep["operators"]["C"] = synth.operators().C.deriv_coeffs;
  rep["operators"]["L"] = synth.L().deriv_coeffs;
  rep["operators"]["Fbar"] = synth.Fbar().deriv_coeffs;
  rep["operators"]["D_samples"] = synth.operators().D.integral_kernel;
  nlohmann::json erow = nlohmann::json::array();
  for (Eigen::Index i = 0; i < synth.operators().E.state_gain.size(); ++i) {
    erow.push_back(synth.operators().E.state_gain(i));
  }
  rep["operators"]["E"] = erow;

  if (out_file.empty()) {
    std::cout << rep.dump(2) << "\n";
  } else {
    std::ofstream os(out_file);
    if (!os) throw ScenarioError(ErrorCode::Io, "cannot write " + out_file);
    os << rep.dump(2) << "\n";
    std::cout << "wrote " << out_file << "\n";
  }
  if (!kernel_dump.empty()) {
    std::ofstream os(kernel_dump);
    if (!os) throw ScenarioError(ErrorCode::Io, "cannot write " + kernel_dump);
    synth.kernels().dump_csv(os, sc.grid.N);
    std::cout << "wrote " << kernel_dump << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& config) {
  const ScenarioFile sc = load_config(config, "");
  const auto results = sandwich::verify::run_all(sc);
  size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name
              << std::string(width - r.name.size() + 2, ' ') << r.detail << "\n";
    if (!r.passed) ++failures;
  }
  std::cout << results.size() - failures << "/" << results.size()
            << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

int cmd_sweep(const std::string& config, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir,
              int jobs) {
  const ScenarioFile base = load_config(config, "");
  nlohmann::json base_json = base.to_json();
  const nlohmann::json::json_pointer ptr{param};
  base_json.at(ptr);  // throws early on a bad path

  struct Job {
    double value;
    fs::path dir;
    std::string error;
    bool ok = false;
  };
  std::vector<Job> jobs_list;
  for (double v : values) {
    Job j;
    j.value = v;
    std::string tag = param + "=" + sandwich::format_double(v);
    for (char& ch : tag) {
      if (ch == '/') ch = '.';
    }
    j.dir = fs::path(out_dir) / tag;
    jobs_list.push_back(std::move(j));
  }

  std::mutex mu;
  size_t next = 0;
  const auto worker = [&]() {
    for (;;) {
      size_t idx;
      {
        std::lock_guard lock(mu);
        if (next >= jobs_list.size()) return;
        idx = next++;
      }
      Job& job = jobs_list[idx];
      try {
        nlohmann::json j = base_json;
        j[ptr] = job.value;
        const ScenarioFile sc = ScenarioFile::from_json(j);
        const auto artifacts = sandwich::execute_scenario(sc);
        sandwich::write_run(artifacts, sc, job.dir);
        job.ok = true;
      } catch (const std::exception& e) {
        job.error = e.what();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(jobs_list.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int failures = 0;
  for (const auto& job : jobs_list) {
    if (job.ok) {
      std::cout << "ok    " << job.dir.string() << "\n";
    } else {
      std::cout << "fail  " << job.dir.string() << "  " << job.error << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary control of a heat PDE sandwiched between two ODEs"};
  app.require_subcommand(1);

  std::string config, mode, out_dir = "out", out_file, kernel_dump, param;
  std::vector<double> values;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  auto* sim = app.add_subcommand("simulate", "run a scenario and write CSV/JSON outputs");
  sim->add_option("--config", config, "scenario JSON file, or 'baseline'")->required();
  sim->add_option("--mode", mode, "open_loop | state_feedback | output_feedback");
  sim->add_option("--out", out_dir, "output directory");

  auto* syn = app.add_subcommand("synthesize", "kernel/operator report only");
  syn->add_option("--config", config, "scenario JSON file, or 'baseline'")->required();
  syn->add_option("--out", out_file, "report file (stdout when omitted)");
  syn->add_option("--dump-kernels", kernel_dump, "kernel sample CSV");

  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  ver->add_option("--config", config, "scenario JSON file, or 'baseline'")->required();

  auto* swp = app.add_subcommand("sweep", "run the scenario across parameter values");
  swp->add_option("--config", config, "scenario JSON file, or 'baseline'")->required();
  swp->add_option("--param", param, "JSON pointer into the scenario, e.g. /gains/c/1")->required();
  swp->add_option("--values", values, "values to sweep")->required()->delimiter(',');
  swp->add_option("--out", out_dir, "output directory");
  swp->add_option("--jobs", jobs, "parallel workers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config, mode, out_dir);
    if (syn->parsed()) return cmd_synthesize(config, out_file, kernel_dump);
    if (ver->parsed()) return cmd_verify(config);
    if (swp->parsed()) return cmd_sweep(config, param, values, out_dir, jobs);
  } catch (const ScenarioError& e) {
    return error_exit(e.code(), e.what());
  } catch (const std::invalid_argument& e) {
    return error_exit(ErrorCode::Config, e.what());
  } catch (const std::exception& e) {
    return error_exit(ErrorCode::Generic, e.what());
  }
  return 0;
}

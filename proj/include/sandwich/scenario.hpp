#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "sandwich/controller.hpp"
#include "sandwich/observer.hpp"
#include "sandwich/plant.hpp"
#include "sandwich/simulator.hpp"

namespace sandwich {

/// Error taxonomy mapped onto distinct CLI exit codes.
enum class ErrorCode {
  Ok = 0,
  Generic = 1,
  Config = 2,       // schema violations, bad dimensions, bad values
  Synthesis = 3,    // uncontrollable pair, non-Hurwitz, singular G/G1
  Stability = 4,    // explicit-scheme condition violated
  Io = 5,
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Full scenario: plant, grid, gains, mode, initial conditions, and output
/// options.  JSON round-trips losslessly.
struct ScenarioFile {
  PlantConfig plant;
  GridSpec grid;
  GainSet gains;
  Mode mode = Mode::OutputFeedback;
  InitialConditions initial;
  RunOptions output;
  int stencil_accuracy = 1;

  static ScenarioFile from_json(const nlohmann::json& j);
  static ScenarioFile load(const std::filesystem::path& file);
  nlohmann::json to_json() const;

  /// The bundled reference scenario (the one every acceptance check runs).
  static ScenarioFile baseline();
};

Mode mode_from_string(const std::string& s);
std::string mode_to_string(Mode m);

/// Locale-independent shortest-faithful float formatting (17 significant
/// digits) used for every CSV cell.
std::string format_double(double v);

struct RunArtifacts {
  TimeSeries series;
  std::optional<SynthesisReport> synthesis_report;
  nlohmann::json report;  // assembled report.json payload
};

/// Execute a scenario end to end (synthesis as required by the mode, run,
/// residual summary, decay fits) and assemble the report payload.
RunArtifacts execute_scenario(const ScenarioFile& sc);

/// Write timeseries.csv, field CSVs, and report.json under `dir`.
void write_run(const RunArtifacts& artifacts, const ScenarioFile& sc,
               const std::filesystem::path& dir);

}  // namespace sandwich

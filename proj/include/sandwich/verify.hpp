#pragma once

#include <string>
#include <vector>

#include "sandwich/scenario.hpp"

namespace sandwich::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Kernel certificates: exact boundary values, analytic + Richardson
/// second-difference BVP residuals, transform round-trip battery, derivative
/// consistency, resolved inverse-pair sign.
std::vector<CheckResult> kernel_checks(const ScenarioFile& sc);

/// Operator certificates: chi table vs numeric differentiation of the
/// Volterra term, virtual-control coefficients, feedback-operator reduction.
std::vector<CheckResult> operator_checks(const ScenarioFile& sc);

/// Simulation certificates on the configured scenario: transformed-plant
/// residuals, estimator-error boundary/heat checks, decay-fit sanity, and a
/// two-grid convergence estimate (dx halved, dt quartered).
std::vector<CheckResult> simulation_checks(const ScenarioFile& sc);

/// Everything above in order.
std::vector<CheckResult> run_all(const ScenarioFile& sc);

}  // namespace sandwich::verify

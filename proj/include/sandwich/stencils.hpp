#pragma once

#include <span>
#include <vector>

namespace sandwich::fd {

enum class Side { Left, Right };

/// Fornberg weights for the d-th derivative at x0 given arbitrary nodes.
std::vector<double> fornberg_weights(double x0, std::span<const double> nodes,
                                     int deriv);

/// One-sided weights for the d-th derivative at a boundary of a uniform grid
/// with spacing h, at accuracy order `acc` (stencil width d + acc).  Weights
/// are returned in grid order starting from the boundary point and walking
/// inward.
std::vector<double> one_sided_weights(int deriv, int acc, double h);

/// d-th derivative of `f` at the chosen boundary (one-sided, accuracy `acc`).
/// deriv == 0 returns the boundary sample itself.
double boundary_derivative(std::span<const double> f, double h, int deriv,
                           int acc, Side side);

/// Gradient samples: central differences on the interior, one-sided (matching
/// accuracy >= 2 falls back to the 2-point formula at acc 1) at the ends.
std::vector<double> gradient(std::span<const double> f, double h);

/// Second-derivative samples: central on the interior, one-sided at the ends.
std::vector<double> second_derivative(std::span<const double> f, double h);

}  // namespace sandwich::fd

#pragma once

#include <span>
#include <vector>

namespace sandwich::quad {

/// Composite Simpson over uniformly spaced samples (odd point count required).
double simpson(std::span<const double> f, double h);

/// Quadrature weights w_j for integrating samples f_0..f_k on a uniform grid,
/// i.e. \int_{x_0}^{x_k} f dx ~ sum_j w_j f_j.  Composite Simpson when the
/// interval count k is even; for odd k >= 3 Simpson is closed with a 3/8 rule
/// on the last three intervals; k == 1 falls back to the trapezoid.
std::vector<double> prefix_weights(int k, double h);

/// As above for the tail range [x_j, x_N] of an N-interval grid.
std::vector<double> tail_weights(int intervals, double h);

/// Integral of the prefix range using precomputed-on-the-fly weights.
double integrate_prefix(std::span<const double> f, int k, double h);

}  // namespace sandwich::quad

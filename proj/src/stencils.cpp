#include "sandwich/stencils.hpp"

#include <algorithm>
#include <stdexcept>

namespace sandwich::fd {

std::vector<double> fornberg_weights(double x0, std::span<const double> nodes,
                                     int deriv) {
  const int n = static_cast<int>(nodes.size()) - 1;
  const int m = deriv;
  if (n < m) throw std::invalid_argument("fornberg_weights: too few nodes");
  // c[i][k]: weight of node i for the k-th derivative.
  std::vector<std::vector<double>> c(nodes.size(),
                                     std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][m];
  return w;
}

std::vector<double> one_sided_weights(int deriv, int acc, double h) {
  if (deriv < 0 || acc < 1) {
    throw std::invalid_argument("one_sided_weights: bad derivative/accuracy order");
  }
  if (deriv == 0) return {1.0};
  const int width = deriv + acc;
  std::vector<double> nodes(static_cast<size_t>(width));
  for (int i = 0; i < width; ++i) nodes[static_cast<size_t>(i)] = i * h;
  return fornberg_weights(0.0, nodes, deriv);
}

double boundary_derivative(std::span<const double> f, double h, int deriv,
                           int acc, Side side) {
  if (deriv == 0) return side == Side::Left ? f.front() : f.back();
  const auto w = one_sided_weights(deriv, acc, h);
  if (w.size() > f.size()) {
    throw std::invalid_argument("boundary_derivative: grid narrower than stencil");
  }
  double v = 0.0;
  if (side == Side::Left) {
    for (size_t i = 0; i < w.size(); ++i) v += w[i] * f[i];
  } else {
    // mirrored stencil: odd derivatives flip sign
    const double sgn = (deriv % 2 == 0) ? 1.0 : -1.0;
    for (size_t i = 0; i < w.size(); ++i) v += w[i] * f[f.size() - 1 - i];
    v *= sgn;
  }
  return v;
}

std::vector<double> gradient(std::span<const double> f, double h) {
  const size_t n = f.size();
  if (n < 2) throw std::invalid_argument("gradient: need >= 2 samples");
  std::vector<double> g(n);
  g[0] = (f[1] - f[0]) / h;
  g[n - 1] = (f[n - 1] - f[n - 2]) / h;
  for (size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  return g;
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
  const size_t n = f.size();
  if (n < 3) throw std::invalid_argument("second_derivative: need >= 3 samples");
  std::vector<double> g(n);
  const double h2 = h * h;
  for (size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  g[0] = (f[2] - 2.0 * f[1] + f[0]) / h2;
  g[n - 1] = (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / h2;
  return g;
}

}  // namespace sandwich::fd

#include "sandwich/quadrature.hpp"

#include <stdexcept>

namespace sandwich::quad {

double simpson(std::span<const double> f, double h) {
  const size_t n = f.size();
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument("simpson: need an odd number of points >= 3");
  }
  double odd = 0.0, even = 0.0;
  for (size_t i = 1; i + 1 < n; i += 2) odd += f[i];
  for (size_t i = 2; i + 1 < n; i += 2) even += f[i];
  return h / 3.0 * (f[0] + f[n - 1] + 4.0 * odd + 2.0 * even);
}

std::vector<double> prefix_weights(int k, double h) {
  if (k < 0) throw std::invalid_argument("prefix_weights: negative range");
  std::vector<double> w(static_cast<size_t>(k) + 1, 0.0);
  if (k == 0) return w;
  if (k == 1) {
    w[0] = w[1] = h / 2.0;
    return w;
  }
  int simpson_end = k;     // last index covered by plain Simpson
  bool cap38 = false;
  if (k % 2 != 0) {
    if (k == 3) {
      // pure 3/8 rule
      w[0] = w[3] = 3.0 * h / 8.0;
      w[1] = w[2] = 9.0 * h / 8.0;
      return w;
    }
    simpson_end = k - 3;
    cap38 = true;
  }
  // composite Simpson on [0, simpson_end]
  w[0] += h / 3.0;
  w[static_cast<size_t>(simpson_end)] += h / 3.0;
  for (int i = 1; i < simpson_end; ++i) {
    w[static_cast<size_t>(i)] += (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
  }
  if (cap38) {
    w[static_cast<size_t>(k - 3)] += 3.0 * h / 8.0;
    w[static_cast<size_t>(k - 2)] += 9.0 * h / 8.0;
    w[static_cast<size_t>(k - 1)] += 9.0 * h / 8.0;
    w[static_cast<size_t>(k)] += 3.0 * h / 8.0;
  }
  return w;
}

std::vector<double> tail_weights(int intervals, double h) {
  // [x_j, x_N] has the same structure mirrored; reuse prefix weights reversed.
  std::vector<double> w = prefix_weights(intervals, h);
  std::vector<double> rev(w.rbegin(), w.rend());
  return rev;
}

double integrate_prefix(std::span<const double> f, int k, double h) {
  const auto w = prefix_weights(k, h);
  double s = 0.0;
  for (int i = 0; i <= k; ++i) s += w[static_cast<size_t>(i)] * f[static_cast<size_t>(i)];
  return s;
}

}  // namespace sandwich::quad

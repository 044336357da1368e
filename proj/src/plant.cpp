#include "sandwich/plant.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sandwich {

Eigen::MatrixXd PlantConfig::Az() const {
  const int mm = m();
  Eigen::MatrixXd az = Eigen::MatrixXd::Zero(mm, mm);
  for (int i = 0; i + 1 < mm; ++i) az(i, i + 1) = 1.0;
  for (int j = 0; j < mm; ++j) az(mm - 1, j) = abar[static_cast<size_t>(j)];
  return az;
}

Eigen::VectorXd PlantConfig::Bz() const {
  Eigen::VectorXd bz = Eigen::VectorXd::Zero(m());
  bz(m() - 1) = 1.0;
  return bz;
}

Eigen::RowVectorXd PlantConfig::Cz() const {
  Eigen::RowVectorXd cz = Eigen::RowVectorXd::Zero(m());
  cz(0) = 1.0;
  return cz;
}

void PlantConfig::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw std::invalid_argument("plant: A must be square and non-empty");
  }
  if (B.size() != A.rows() || CX.size() != A.rows()) {
    throw std::invalid_argument("plant: B/C_X dimensions must match A");
  }
  if (abar.empty()) {
    throw std::invalid_argument("plant: abar must have at least one entry (m >= 1)");
  }
  if (!(q > 0.0)) {
    throw std::invalid_argument("plant: diffusivity q must be positive");
  }
  if (!A.allFinite() || !B.allFinite() || !CX.allFinite()) {
    throw std::invalid_argument("plant: non-finite matrix entries");
  }
  for (double a : abar) {
    if (!std::isfinite(a)) throw std::invalid_argument("plant: non-finite abar entry");
  }
}

int GridSpec::steps() const {
  return static_cast<int>(std::llround(t_end / dt));
}

std::vector<double> GridSpec::x() const {
  std::vector<double> xs(static_cast<size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) xs[static_cast<size_t>(i)] = static_cast<double>(i) / N;
  return xs;
}

void GridSpec::validate(const PlantConfig& plant) const {
  if (N < 2 || N % 2 != 0) {
    throw std::invalid_argument("grid: N must be even and >= 2");
  }
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw std::invalid_argument("grid: dt must be positive and t_end >= 0");
  }
  if (N + 1 < 2 * plant.m() + 2) {
    throw std::invalid_argument("grid: N+1 must be >= 2m+2 for the boundary stencils");
  }
  const double ratio = plant.q * dt / (dx() * dx());
  if (ratio > 0.5 + 1e-12) {
    throw std::invalid_argument(
        "grid: explicit-scheme stability violated (q*dt/dx^2 = " +
        std::to_string(ratio) + " > 1/2)");
  }
}

double InitialConditions::eval_profile(double x) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Baseline:
      return std::sin(2.0 * std::numbers::pi * x);
    case Kind::Custom: {
      double v = 0.0;
      for (const auto& t : u_terms) {
        if (t.fn == "sin") {
          v += t.coef * std::sin(t.omega * x);
        } else if (t.fn == "cos") {
          v += t.coef * std::cos(t.omega * x);
        } else if (t.fn == "poly") {
          v += t.coef * std::pow(x, t.power);
        } else {
          throw std::invalid_argument("initial: unknown term '" + t.fn + "'");
        }
      }
      return v;
    }
  }
  return 0.0;
}

SimState InitialConditions::build(const PlantConfig& plant,
                                  const GridSpec& grid) const {
  SimState s;
  s.t = 0.0;
  s.u.resize(static_cast<size_t>(grid.points()));
  for (int i = 0; i <= grid.N; ++i) {
    s.u[static_cast<size_t>(i)] = eval_profile(static_cast<double>(i) / grid.N);
  }
  const int n = plant.n(), m = plant.m();
  s.X = Eigen::VectorXd::Zero(n);
  s.Z = Eigen::VectorXd::Zero(m);
  if (kind == Kind::Custom) {
    if (!X0.empty()) {
      if (static_cast<int>(X0.size()) != n) {
        throw std::invalid_argument("initial: X0 length != n");
      }
      for (int i = 0; i < n; ++i) s.X(i) = X0[static_cast<size_t>(i)];
    }
    if (!Z0.empty()) {
      if (static_cast<int>(Z0.size()) != m) {
        throw std::invalid_argument("initial: Z0 length != m");
      }
      for (int i = 0; i < m; ++i) s.Z(i) = Z0[static_cast<size_t>(i)];
    }
  } else if (kind == Kind::Baseline) {
    s.X(0) = s.u.front();
    s.Z(0) = s.u.back();
  }
  // boundary samples follow the ODE states
  s.u.front() = plant.CX * s.X;
  s.u.back() = plant.Cz() * s.Z;
  return s;
}

InitialConditions InitialConditions::baseline() {
  InitialConditions ic;
  ic.kind = Kind::Baseline;
  return ic;
}

InitialConditions InitialConditions::zero() {
  InitialConditions ic;
  ic.kind = Kind::Zero;
  return ic;
}

}  // namespace sandwich

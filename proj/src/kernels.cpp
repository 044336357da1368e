#include "sandwich/kernels.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "sandwich/linalg.hpp"
#include "sandwich/quadrature.hpp"

namespace sandwich {

namespace {
// Evaluation slack beyond [0,1] / the triangle: the closed forms are entire,
// and the finite-difference oracles need to straddle the endpoints.
constexpr double kDomainSlack = 0.05;
}  // namespace

KernelBlocks build_block_matrices(const PlantConfig& plant,
                                  const Eigen::RowVectorXd& K) {
  plant.validate();
  const int n = plant.n(), m = plant.m();
  if (K.size() != n) {
    throw std::invalid_argument("build_block_matrices: K must be 1 x n");
  }
  const double q = plant.q;
  KernelBlocks kb;

  kb.D = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  kb.D.block(0, n, n, n) = plant.A / q;
  kb.D.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  kb.D.block(n, n, n, n) = -(plant.B * plant.CX) / q;

  kb.E = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  kb.E.block(0, n, n, n) = (plant.A + plant.B * K) / q;
  kb.E.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);

  kb.F = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  kb.F.block(0, m, m, m) = plant.Az() / q;
  kb.F.block(m, 0, m, m) = Eigen::MatrixXd::Identity(m, m);
  kb.G = linalg::mat_exp(kb.F).block(m, 0, m, m);

  kb.F1 = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  kb.F1.block(0, n, n, n) = plant.A / q;
  kb.F1.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  kb.G1 = linalg::mat_exp(kb.F1).block(n, 0, n, n);

  return kb;
}

void KernelSet::check_order(int a, int b) const {
  if (a < 0 || b < 0 || a + b > max_order_) {
    throw std::invalid_argument("kernel derivative order out of range (max " +
                                std::to_string(max_order_) + ")");
  }
}

void KernelSet::check_triangle(double x, double y) const {
  if (x < -kDomainSlack || x > 1.0 + kDomainSlack || y < -kDomainSlack ||
      y > x + kDomainSlack) {
    throw std::domain_error("kernel evaluation outside 0 <= y <= x <= 1");
  }
}

double KernelSet::phi(int a, int b, double x, double y) const {
  check_order(a, b);
  check_triangle(x, y);
  const int n = plant_.n();
  const double sgn = (b % 2 == 0) ? 1.0 : -1.0;
  const Eigen::RowVectorXd r =
      fwd_row_ * dpow(a + b) * linalg::mat_exp(blocks_.D * (x - y));
  return sgn / plant_.q * r.head(n) * plant_.B;
}

Eigen::RowVectorXd KernelSet::Phi(int a, double x) const {
  check_order(a, 0);
  if (x < -kDomainSlack || x > 1.0 + kDomainSlack) {
    throw std::domain_error("Phi evaluation outside [0,1]");
  }
  const int n = plant_.n();
  return (fwd_row_ * dpow(a) * linalg::mat_exp(blocks_.D * x)).head(n);
}

double KernelSet::psi(int a, int b, double x, double y) const {
  check_order(a, b);
  check_triangle(x, y);
  const int n = plant_.n();
  const double sgn = (b % 2 == 0) ? 1.0 : -1.0;
  const Eigen::RowVectorXd r =
      inv_row_ * epow(a + b) * linalg::mat_exp(blocks_.E * (x - y));
  return gamma_sign_ * sgn / plant_.q * r.head(n) * plant_.B;
}

Eigen::RowVectorXd KernelSet::Gamma(int a, double x) const {
  check_order(a, 0);
  if (x < -kDomainSlack || x > 1.0 + kDomainSlack) {
    throw std::domain_error("Gamma evaluation outside [0,1]");
  }
  const int n = plant_.n();
  return gamma_sign_ *
         (inv_row_ * epow(a) * linalg::mat_exp(blocks_.E * x)).head(n);
}

Eigen::RowVectorXd KernelSet::vartheta(int a, double x) const {
  check_order(a, 0);
  if (x < -kDomainSlack || x > 1.0 + kDomainSlack) {
    throw std::domain_error("vartheta evaluation outside [0,1]");
  }
  const int m = plant_.m();
  return (vth_row_ * Fpow_[static_cast<size_t>(a)] *
          linalg::mat_exp(blocks_.F * x))
      .head(m);
}

Eigen::RowVectorXd KernelSet::theta(int a, double x) const {
  check_order(a, 0);
  if (x < -kDomainSlack || x > 1.0 + kDomainSlack) {
    throw std::domain_error("theta evaluation outside [0,1]");
  }
  const int n = plant_.n();
  return (th_row_ * F1pow_[static_cast<size_t>(a)] *
          linalg::mat_exp(blocks_.F1 * x))
      .head(n);
}

std::vector<double> KernelSet::forward_transform(const std::vector<double>& u,
                                                 const Eigen::VectorXd& X) const {
  const int N = static_cast<int>(u.size()) - 1;
  const double h = 1.0 / N;
  // phi depends on x - y only: one sample per grid offset
  std::vector<double> phi_diff(u.size());
  for (int d = 0; d <= N; ++d) phi_diff[static_cast<size_t>(d)] = phi(0, 0, d * h, 0.0);
  std::vector<double> w(u.size());
  std::vector<double> f(u.size());
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= i; ++j) {
      f[static_cast<size_t>(j)] = phi_diff[static_cast<size_t>(i - j)] * u[static_cast<size_t>(j)];
    }
    const double integral = quad::integrate_prefix(f, i, h);
    w[static_cast<size_t>(i)] =
        u[static_cast<size_t>(i)] - integral - Phi(0, i * h) * X;
  }
  return w;
}

std::vector<double> KernelSet::inverse_transform(const std::vector<double>& w,
                                                 const Eigen::VectorXd& X) const {
  const int N = static_cast<int>(w.size()) - 1;
  const double h = 1.0 / N;
  std::vector<double> psi_diff(w.size());
  for (int d = 0; d <= N; ++d) psi_diff[static_cast<size_t>(d)] = psi(0, 0, d * h, 0.0);
  std::vector<double> u(w.size());
  std::vector<double> f(w.size());
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= i; ++j) {
      f[static_cast<size_t>(j)] = psi_diff[static_cast<size_t>(i - j)] * w[static_cast<size_t>(j)];
    }
    const double integral = quad::integrate_prefix(f, i, h);
    u[static_cast<size_t>(i)] =
        w[static_cast<size_t>(i)] - integral - Gamma(0, i * h) * X;
  }
  return u;
}

double KernelSet::roundtrip_max_error(
    const std::vector<std::vector<double>>& profiles,
    const std::vector<Eigen::VectorXd>& states, int N) const {
  double err = 0.0;
  for (size_t p = 0; p < profiles.size(); ++p) {
    const auto& u = profiles[p];
    const auto& X = states[p % states.size()];
    const auto w = forward_transform(u, X);
    const auto back = inverse_transform(w, X);
    for (int i = 0; i <= N; ++i) {
      err = std::max(err, std::abs(back[static_cast<size_t>(i)] - u[static_cast<size_t>(i)]));
    }
  }
  return err;
}

KernelSet KernelSet::build(const PlantConfig& plant,
                           const Eigen::RowVectorXd& K) {
  KernelSet ks;
  ks.plant_ = plant;
  ks.K_ = K;
  ks.blocks_ = build_block_matrices(plant, K);
  const int n = plant.n(), m = plant.m();
  ks.max_order_ = 2 * m + 1;

  ks.cond_G_ = linalg::cond(ks.blocks_.G);
  ks.cond_G1_ = linalg::cond(ks.blocks_.G1);
  // Singularity must be judged against the scale of e^F, not of G itself:
  // G is a sub-block and collapses to ~eps while e^F stays O(1).
  const auto block_singular = [](const Eigen::MatrixXd& g, const Eigen::MatrixXd& f) {
    const double scale = std::max(1.0, linalg::mat_exp(f).norm());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    return svd.singularValues().minCoeff() <= 1e-10 * scale;
  };
  if (block_singular(ks.blocks_.G, ks.blocks_.F) ||
      block_singular(ks.blocks_.G1, ks.blocks_.F1)) {
    throw std::runtime_error(
        "kernel synthesis impossible: singular boundary-value block (A or A_z "
        "has an eigenvalue of the form -k^2*pi^2)");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu_g(ks.blocks_.G);
  Eigen::FullPivLU<Eigen::MatrixXd> lu_g1(ks.blocks_.G1);

  const double cxb = plant.CX * plant.B;
  ks.fwd_row_.resize(2 * n);
  ks.fwd_row_ << plant.CX, (K - (cxb / plant.q) * plant.CX);
  ks.inv_row_.resize(2 * n);
  ks.inv_row_ << plant.CX, K;

  const Eigen::MatrixXd g_inv = lu_g.inverse();
  ks.vth_row_.resize(2 * m);
  ks.vth_row_ << Eigen::RowVectorXd::Zero(m), Eigen::RowVectorXd(-plant.Cz() * g_inv);

  const Eigen::MatrixXd g1_inv = lu_g1.inverse();
  const Eigen::MatrixXd expF1 = linalg::mat_exp(ks.blocks_.F1);
  const Eigen::RowVectorXd tl = plant.CX * expF1.block(0, 0, n, n);
  ks.th_row_.resize(2 * n);
  ks.th_row_ << -plant.CX, Eigen::RowVectorXd(tl * g1_inv);

  const auto powers = [](const Eigen::MatrixXd& mat, int count) {
    std::vector<Eigen::MatrixXd> p;
    p.reserve(static_cast<size_t>(count) + 1);
    p.push_back(Eigen::MatrixXd::Identity(mat.rows(), mat.cols()));
    for (int k = 1; k <= count; ++k) p.push_back(p.back() * mat);
    return p;
  };
  ks.Dpow_ = powers(ks.blocks_.D, ks.max_order_);
  ks.Epow_ = powers(ks.blocks_.E, ks.max_order_);
  ks.Fpow_ = powers(ks.blocks_.F, ks.max_order_);
  ks.F1pow_ = powers(ks.blocks_.F1, ks.max_order_);

  // Resolve the inverse-pair sign by the round-trip probe: the printed
  // closed form carries an orientation ambiguity, the algebra does not.
  std::vector<std::vector<double>> probes;
  const int N = 64;
  for (int which = 0; which < 3; ++which) {
    std::vector<double> u(N + 1);
    for (int i = 0; i <= N; ++i) {
      const double x = static_cast<double>(i) / N;
      if (which == 0) u[static_cast<size_t>(i)] = std::sin(std::numbers::pi * x);
      if (which == 1) u[static_cast<size_t>(i)] = 1.0 + x - 0.5 * x * x;
      if (which == 2)
        u[static_cast<size_t>(i)] = std::cos(2.0 * std::numbers::pi * x) + x * x * x;
    }
    probes.push_back(std::move(u));
  }
  std::vector<Eigen::VectorXd> states;
  states.push_back(Eigen::VectorXd::Ones(n));
  Eigen::VectorXd alt(n);
  for (int i = 0; i < n; ++i) alt(i) = (i % 2 == 0) ? 1.0 : -0.5;
  states.push_back(alt);

  ks.gamma_sign_ = -1;
  const double err_neg = ks.roundtrip_max_error(probes, states, N);
  ks.gamma_sign_ = +1;
  const double err_pos = ks.roundtrip_max_error(probes, states, N);
  ks.gamma_sign_ = (err_pos < err_neg) ? +1 : -1;

  return ks;
}

void KernelSet::dump_csv(std::ostream& os, int N) const {
  const double h = 1.0 / N;
  os << std::setprecision(17);
  os << "kernel,x,y,value\n";
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= i; ++j) {
      os << "phi," << i * h << "," << j * h << "," << phi(0, 0, i * h, j * h) << "\n";
    }
  }
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= i; ++j) {
      os << "psi," << i * h << "," << j * h << "," << psi(0, 0, i * h, j * h) << "\n";
    }
  }
  const auto dump_row = [&](const char* name, auto&& eval, int len) {
    for (int i = 0; i <= N; ++i) {
      const Eigen::RowVectorXd r = eval(i * h);
      for (int c = 0; c < len; ++c) {
        os << name << "[" << c << "]," << i * h << ",," << r(c) << "\n";
      }
    }
  };
  dump_row("Phi", [&](double x) { return Phi(0, x); }, plant_.n());
  dump_row("Gamma", [&](double x) { return Gamma(0, x); }, plant_.n());
  dump_row("vartheta", [&](double x) { return vartheta(0, x); }, plant_.m());
  dump_row("theta", [&](double x) { return theta(0, x); }, plant_.n());
}

}  // namespace sandwich

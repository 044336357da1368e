#include "sandwich/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sandwich::linalg {

bool all_finite(const Matrix& m) { return m.allFinite(); }

namespace {

// Diagonal Pade numerator coefficients, orders 3/5/7/9/13 (Higham 2005).
Matrix pade_exp(const Matrix& a, int order) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix u, v;
  const Matrix a2 = a * a;
  switch (order) {
    case 3: {
      const double b[] = {120, 60, 12, 1};
      u = a * (b[3] * a2 + b[1] * id);
      v = b[2] * a2 + b[0] * id;
      break;
    }
    case 5: {
      const double b[] = {30240, 15120, 3360, 420, 30, 1};
      const Matrix a4 = a2 * a2;
      u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    case 7: {
      const double b[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
      const Matrix a4 = a2 * a2;
      const Matrix a6 = a4 * a2;
      u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    case 9: {
      const double b[] = {17643225600, 8821612800, 2075673600, 302702400,
                          30270240,    2162160,    110880,     3960,
                          90,          1};
      const Matrix a4 = a2 * a2;
      const Matrix a6 = a4 * a2;
      const Matrix a8 = a6 * a2;
      u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    default: {  // 13
      const double b[] = {64764752532480000, 32382376266240000, 7771770303897600,
                          1187353796428800,  129060195264000,   10559470521600,
                          670442572800,      33522128640,       1323241920,
                          40840800,          960960,            16380,
                          182,               1};
      const Matrix a4 = a2 * a2;
      const Matrix a6 = a4 * a2;
      u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
               b[5] * a4 + b[3] * a2 + b[1] * id);
      v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
          b[2] * a2 + b[0] * id;
      break;
    }
  }
  // exp(a) ~ (v - u)^{-1} (v + u)
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix mat_exp(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("mat_exp: matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("mat_exp: non-finite entries");
  }
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();

  // Order thresholds theta_3..theta_13 from the scaling-and-squaring analysis.
  if (norm1 <= 1.495585217958292e-2) return pade_exp(m, 3);
  if (norm1 <= 2.539398330063230e-1) return pade_exp(m, 5);
  if (norm1 <= 9.504178996162932e-1) return pade_exp(m, 7);
  if (norm1 <= 2.097847961257068e0) return pade_exp(m, 9);

  const double theta13 = 5.371920351148152;
  int s = 0;
  if (norm1 > theta13) {
    s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  Matrix result = pade_exp(m / std::pow(2.0, s), 13);
  for (int i = 0; i < s; ++i) {
    result = result * result;
  }
  if (!result.allFinite()) {
    throw std::runtime_error("mat_exp: overflow (matrix norm too large)");
  }
  return result;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigenvalues: matrix must be square");
  }
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: QR iteration did not converge");
  }
  const auto& vals = solver.eigenvalues();
  std::vector<std::complex<double>> out(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) out[i] = vals[i];
  return out;
}

double spectral_abscissa(const Matrix& m) {
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues(m)) a = std::max(a, ev.real());
  return a;
}

bool is_hurwitz(const Matrix& m, double eps_stab) {
  return spectral_abscissa(m) < -eps_stab;
}

bool has_eigenvalue_minus_ksq_pisq(const Matrix& m, int k_max, double tol) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  const auto evs = eigenvalues(m);
  for (int k = 0; k <= k_max; ++k) {
    const double target = -static_cast<double>(k) * k * std::numbers::pi *
                          std::numbers::pi;
    for (const auto& ev : evs) {
      if (std::abs(ev - std::complex<double>(target, 0.0)) <= tol) return true;
    }
  }
  return false;
}

Matrix solve_lyapunov(const Matrix& a_cl, const Matrix& q) {
  const Eigen::Index n = a_cl.rows();
  if (a_cl.cols() != n || q.rows() != n || q.cols() != n) {
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  }
  if (!is_hurwitz(a_cl)) {
    throw std::runtime_error("solve_lyapunov: A_cl is not Hurwitz");
  }
  // vec(P A + A^T P) = (A^T (x) I + I (x) A^T) vec(P), column-major vec.
  const Matrix id = Matrix::Identity(n, n);
  Matrix kron = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // A^T (x) I : block (i,j) = a_cl(j,i) * I
      kron.block(i * n, j * n, n, n) += a_cl(j, i) * id;
      // I (x) A^T : block (i,i) = A^T
    }
    kron.block(i * n, i * n, n, n) += a_cl.transpose();
  }
  Vector rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    rhs.segment(j * n, n) = -q.col(j);
  }
  const Vector vec_p = kron.partialPivLu().solve(rhs);
  Matrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    p.col(j) = vec_p.segment(j * n, n);
  }
  p = 0.5 * (p + p.transpose().eval());
  const double resid = (p * a_cl + a_cl.transpose() * p + q).norm();
  if (!(resid <= 1e-10 * std::max(1.0, q.norm()))) {
    throw std::runtime_error("solve_lyapunov: residual above tolerance");
  }
  return p;
}

Matrix controllability_matrix(const Matrix& a, const Vector& b) {
  const Eigen::Index n = a.rows();
  Matrix ctrb(n, n);
  Vector col = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    ctrb.col(i) = col;
    col = a * col;
  }
  return ctrb;
}

RowVector place_poles(const Matrix& a, const Vector& b,
                      const std::vector<std::complex<double>>& poles) {
  const Eigen::Index n = a.rows();
  if (static_cast<Eigen::Index>(poles.size()) != n) {
    throw std::invalid_argument("place_poles: need one pole per state");
  }
  // Desired characteristic polynomial, expanded in complex arithmetic.
  std::vector<std::complex<double>> coeffs{1.0};
  for (const auto& p : poles) {
    std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i];
      next[i + 1] -= coeffs[i] * p;
    }
    coeffs = std::move(next);
  }
  double imag_max = 0.0;
  for (const auto& c : coeffs) imag_max = std::max(imag_max, std::abs(c.imag()));
  if (imag_max > 1e-9 * (1.0 + std::abs(coeffs.back().real()))) {
    throw std::invalid_argument("place_poles: pole set is not conjugate-closed");
  }

  // p(A) by Horner with the real coefficients.
  Matrix pa = Matrix::Identity(n, n) * coeffs[0].real();
  for (Eigen::Index k = 1; k <= n; ++k) {
    pa = pa * a + coeffs[k].real() * Matrix::Identity(n, n);
  }
  // desired polynomial already annihilates A: nothing to move
  const double a_scale = std::max(1.0, std::pow(a.norm(), static_cast<double>(n)));
  if (pa.norm() <= 1e-12 * a_scale) {
    return RowVector::Zero(n);
  }

  const Matrix ctrb = controllability_matrix(a, b);
  Eigen::FullPivLU<Matrix> lu(ctrb);
  if (lu.rank() < n) {
    throw std::runtime_error("place_poles: (A,B) is uncontrollable");
  }
  RowVector e_n = RowVector::Zero(n);
  e_n(n - 1) = 1.0;
  // K for A + B*K (Ackermann gives the A - B*K gain, hence the sign flip).
  const RowVector k_row = e_n * lu.solve(pa);
  return -k_row;
}

int observability_rank(const Matrix& a, const RowVector& c_row) {
  const Eigen::Index n = a.rows();
  Matrix obsv(n, n);
  RowVector row = c_row;
  for (Eigen::Index i = 0; i < n; ++i) {
    obsv.row(i) = row;
    row = row * a;
  }
  Eigen::FullPivLU<Matrix> lu(obsv);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

double cond(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace sandwich::linalg

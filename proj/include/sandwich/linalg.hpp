#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Dense small-matrix numerics for controller/observer synthesis.
// Everything here targets matrices of a dozen rows at most; algorithms are
// chosen for robustness at that scale, not for speed.

namespace sandwich::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline constexpr double kStabilityMargin = 1e-9;  // eps_stab
inline constexpr double kEigenvalueTol = 1e-8;

/// True iff every entry is finite.
bool all_finite(const Matrix& m);

/// Matrix exponential by scaling-and-squaring with a diagonal Pade core.
/// Throws std::invalid_argument for non-square input and std::runtime_error
/// when the result overflows.
Matrix mat_exp(const Matrix& m);

/// Eigenvalues of a general real square matrix.
/// Throws std::runtime_error if the QR iteration fails to converge.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// max Re(lambda) over the spectrum.
double spectral_abscissa(const Matrix& m);

/// All eigenvalue real parts < -eps_stab.
bool is_hurwitz(const Matrix& m, double eps_stab = kStabilityMargin);

/// True iff some eigenvalue lies within tol of -k^2*pi^2 for k in 0..k_max.
/// (The k=0 case flags an eigenvalue at the origin.)
bool has_eigenvalue_minus_ksq_pisq(const Matrix& m, int k_max,
                                   double tol = kEigenvalueTol);

/// Solve P*A_cl + A_cl^T*P = -Q by Kronecker vectorization.
/// Requires A_cl Hurwitz and Q symmetric positive definite; the returned P is
/// symmetrized and satisfies the residual bound ||P A + A^T P + Q|| <= 1e-10 ||Q||.
Matrix solve_lyapunov(const Matrix& a_cl, const Matrix& q);

/// Single-input pole placement via Ackermann's formula: returns the row K
/// such that eig(A + B*K) matches `poles` (must be conjugate-closed).
/// Throws if (A,B) is uncontrollable.
RowVector place_poles(const Matrix& a, const Vector& b,
                      const std::vector<std::complex<double>>& poles);

/// Controllability matrix [B, AB, ..., A^{n-1}B].
Matrix controllability_matrix(const Matrix& a, const Vector& b);

/// Numerical rank of the observability matrix of the pair (A, c_row).
int observability_rank(const Matrix& a, const RowVector& c_row);

/// 2-norm condition number (SVD).
double cond(const Matrix& m);

}  // namespace sandwich::linalg

#pragma once

#include <Eigen/Core>

namespace dth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Euclidean norm for vectors.
inline double norm(const Vector& v) { return v.norm(); }

/// Frobenius norm for matrices. Upper-bounds the spectral norm, so every
/// constant built from it stays a valid bound.
inline double norm(const Matrix& m) { return m.norm(); }

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

/// Solves A x = b by LU with partial pivoting.
/// Throws LinearSolveError when the reciprocal condition estimate drops
/// below `min_rcond`.
Vector lu_solve(const Matrix& a, const Vector& b, double min_rcond = 1e-14);

/// Symmetric part 0.5 (A + A^T).
Matrix symmetrize(const Matrix& a);

}  // namespace dth

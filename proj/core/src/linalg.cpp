#include "dthsem/linalg.hpp"

#include <Eigen/LU>

#include "dthsem/errors.hpp"

namespace dth {

bool all_finite(const Vector& v) { return v.allFinite(); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

Vector lu_solve(const Matrix& a, const Vector& b, double min_rcond) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw DimensionError("lu_solve: matrix and right-hand side sizes disagree");
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc >= min_rcond)) {
    throw LinearSolveError("lu_solve: matrix is numerically singular", rc);
  }
  return lu.solve(b);
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace dth

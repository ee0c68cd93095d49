#include "cex/random.hpp"

#include <cmath>

#include "cex/error.hpp"

namespace cex {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  // Column-major fill order keeps the draw sequence independent of Eigen internals.
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(r, c) = Complex(re, im);
    }
  return m;
}

PureState random_state(SubsystemLayout layout, Rng& rng) {
  Vector v = gaussian_matrix(static_cast<Eigen::Index>(layout.total_dim()), 1, rng).col(0);
  v.normalize();
  return PureState(std::move(layout), std::move(v));
}

Matrix random_isometry_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (rows < cols) fail(ErrorCode::dimension_mismatch, "isometry needs rows >= cols");
  const Matrix g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topLeftCorner(cols, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  // One Gram-Schmidt refinement pass pins the isometry defect near machine epsilon.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return q;
}

LocalIsometry random_unitary(std::vector<Subsystem> subsystems, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(product_dim(subsystems));
  auto outputs = subsystems;
  return LocalIsometry(std::move(subsystems), std::move(outputs), random_isometry_matrix(d, d, rng));
}

}  // namespace cex

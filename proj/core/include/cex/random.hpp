#pragma once

#include <cstdint>
#include <random>

#include "cex/statevec.hpp"

namespace cex {

using Rng = std::mt19937_64;

/// Matrix of i.i.d. standard complex Gaussians (real and imaginary parts
/// each N(0, 1/2)).
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Haar-random pure state over `layout`.
PureState random_state(SubsystemLayout layout, Rng& rng);

/// rows x cols matrix with orthonormal columns (rows >= cols), obtained by
/// QR of a Gaussian matrix with the R-diagonal phases absorbed.
Matrix random_isometry_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Haar-random unitary acting on `subsystems` (outputs equal inputs).
LocalIsometry random_unitary(std::vector<Subsystem> subsystems, Rng& rng);

}  // namespace cex

#pragma once

// See-saw search for good bounded-dimension strategies.
//
// The win probability is ||Omega||_F^2 with
// Omega = (1/2) sum_r A_r (X_r (x) Psi) B_r^T. Writing it as
// max_W (Re <W, Omega>)^2 over unit W makes it linear in each of A, B and
// Psi separately: the player steps are orthogonal-Procrustes problems solved
// by one SVD, and the shared-state step is a top eigenvector. Every step is
// an exact maximizer of its sub-problem, so the objective never decreases.

#include <cstdint>
#include <optional>
#include <vector>

#include "cex/game.hpp"

namespace cex {

enum class Player { alice, bob, shared };

std::string_view to_string(Player player);

struct SeesawConfig {
  std::size_t d = 1;
  std::size_t restarts = 20;
  std::size_t max_iters = 500;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  /// Residue dimension per party; 0 means 3d.
  std::size_t y_dim = 0;
  /// Replaces the random start of restart 0.
  std::optional<Strategy> warm_start;
  /// Worker threads for independent restarts; does not affect the result.
  std::size_t jobs = 1;
};

struct SeesawReport {
  std::size_t d = 0;
  double best_value = 0.0;
  std::size_t best_restart = 0;
  std::optional<Strategy> best_strategy;
  std::vector<std::vector<double>> trajectories;
  double upper_bound = 0.0;
  std::uint64_t seed = 0;
};

/// Seeded random strategy: Gaussian shared state, QR-orthonormalized
/// Gaussian isometries (S, XA) -> (A, YA) and (T, XB) -> (B, YB).
Strategy random_strategy(std::size_t d, std::size_t y_dim, std::uint64_t seed);

/// Exact maximization over one factor with the others fixed.
Strategy improve_player(const Strategy& strategy, Player which);

/// Per-restart seed derivation shared by the optimizer and its callers.
std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart);

/// Errors: DomainError (invalid config, 2 y_dim < 3d), TooLarge.
SeesawReport seesaw(const SeesawConfig& config);

}  // namespace cex

#pragma once

// Closed-form and Gram-sum evaluation of exchange resources.
//
// With phi and the phase-aligned psi~ overlapping in the real number a, the
// terms t_k = phi^{(x)k} (x) psi~^{(x)(N+1-k)}, k = 0..N+1, have Gram entries
// <t_j|t_k> = a^{|j-k|}. The resource is proportional to t_1 + ... + t_N, the
// forward residual to t_2 + ... + t_{N+1} and the backward residual to
// t_0 + ... + t_{N-1}, so every overlap the exchange needs is a sum of
// powers of a over a rectangle of (j, k) pairs.

#include <cstdint>

#include "cex/common.hpp"
#include "cex/statevec.hpp"

namespace cex {

class GramResource {
 public:
  /// DomainError unless N >= 1 and 0 <= a <= 1.
  GramResource(std::uint64_t n, double a);

  std::uint64_t n() const { return n_; }
  double a() const { return a_; }

  double term_overlap(std::uint64_t j, std::uint64_t k) const;

  /// Sum of a^{|j-k|} over j in [j0, j1], k in [k0, k1]; linear in N.
  double interval_sum(std::uint64_t j0, std::uint64_t j1, std::uint64_t k0, std::uint64_t k1) const;

  /// Squared norm of t_1 + ... + t_N, i.e. the normalization N1.
  double normalization() const;

  /// <E'|E> for the residual left by an exchange in `direction`.
  double residual_overlap(Direction direction = Direction::forward) const;

  /// N x N Gram matrix of t_1..t_N. TooLarge beyond 4096.
  Eigen::MatrixXd gram_matrix() const;

 private:
  std::uint64_t n_;
  double a_;
};

/// N1 = (1+a)/(1-a) N - 2a(1-a^N)/(1-a)^2. DomainError for a >= 1.
double normalization_N1(std::uint64_t n, double a);

/// <E'_N|E_N> = 1 - (1-a^N)/N1. DomainError for a >= 1.
double overlap_formula(std::uint64_t n, double a);

}  // namespace cex

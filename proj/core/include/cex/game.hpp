#pragma once

// The two-player cooperative game with a quantum referee.
//
// The referee prepares (|0>|00> + |1>|phi>)/sqrt(2) on (R, S, T) with
// phi = (|11> + |22>)/sqrt(2), sends S to Alice and T to Bob, receives one
// qubit from each (A and B) and accepts on gamma = (|000> + |111>)/sqrt(2)
// over (R, A, B).
//
// Registers: R (2), S and T (3), the shared state over XA and XB (d each),
// answers A and B (2), and the kept residues YA and YB. Alice's isometry maps
// (S, XA) to (A, YA) with A the slowest output index, so rows
// [r * yA, (r + 1) * yA) of its matrix form the branch operator A_r.

#include <cstdint>
#include <optional>

#include "cex/common.hpp"
#include "cex/statevec.hpp"

namespace cex {

namespace reg {
inline const std::string R = "R";
inline const std::string S = "S";
inline const std::string T = "T";
inline const std::string A = "A";
inline const std::string B = "B";
inline const std::string XA = "XA";
inline const std::string XB = "XB";
inline const std::string YA = "YA";
inline const std::string YB = "YB";
}  // namespace reg

struct GameSpec {
  SubsystemLayout referee_layout;
  PureState phi;             // over (S, T)
  PureState initial_state;   // over (R, S, T)
  PureState accept_vector;   // gamma over (R, A, B)

  static GameSpec standard();
};

class Strategy {
 public:
  /// Free-form strategy. The shared state lives on (XA, XB) with equal
  /// dimensions d; alice maps (S, XA) -> (A, YA), bob maps (T, XB) -> (B, YB).
  /// DimensionMismatch when registers disagree with that shape.
  Strategy(PureState shared_state, LocalIsometry alice, LocalIsometry bob);

  /// Prescribed strategy record; materialized when its final state fits the
  /// dense budget.
  static Strategy prescribed(std::uint64_t n);

  bool is_materialized() const { return shared_.has_value(); }
  std::optional<std::uint64_t> prescribed_n() const { return prescribed_n_; }

  /// Per-party dimension; only meaningful when materialized.
  std::size_t d() const { return d_; }
  /// log2 of the per-party dimension, available for every strategy.
  double log2_d() const { return log2_d_; }
  std::size_t y_alice() const;
  std::size_t y_bob() const;

  /// TooLarge when not materialized.
  const PureState& shared_state() const;
  const LocalIsometry& alice() const;
  const LocalIsometry& bob() const;

  /// Shared state as a d x d matrix, rows indexed by XA.
  Matrix shared_matrix() const;
  /// A_r = (<r| (x) I) A and B_r likewise.
  Matrix alice_branch(int r) const;
  Matrix bob_branch(int r) const;

 private:
  Strategy() = default;

  std::size_t d_ = 0;
  double log2_d_ = 0.0;
  std::optional<PureState> shared_;
  std::optional<LocalIsometry> alice_;
  std::optional<LocalIsometry> bob_;
  std::optional<std::uint64_t> prescribed_n_;
};

/// Probability of the accepting outcome: squared norm of the gamma component
/// on (R, A, B). MissingRegisters when any of them is absent.
double referee_outcome_probability(const PureState& returned);

/// The marking unitary on (S, A): |s>|b> -> |s>|b xor [s != 0]>.
LocalIsometry marking_unitary(const std::string& input, const std::string& answer);

/// Prescribed family: each player marks its answer qubit and, controlled on
/// it, cyclically shifts (S, X_1, ..., X_{N+1}) against the resource that
/// exchanges phi for |00>. Per-party dimension 3^{N+1}.
Strategy prescribed_strategy(std::uint64_t n);

/// The dense final state (R, A, YA, B, YB). TooLarge over the dense budget.
PureState final_state(const Strategy& strategy);

/// Win probability. Dense simulates the referee protocol; gram evaluates a
/// prescribed strategy in closed form (UnsupportedStrategy otherwise).
double play(const Strategy& strategy, Backend backend = Backend::dense);

/// (1/4) || sum_r A_r (X_r (x) Psi) B_r^T ||_F^2, the branch-operator form.
double win_probability_from_branches(const Strategy& strategy);

/// Closed-form value of the prescribed strategy, 1 - 1/(2N).
double prescribed_value(std::uint64_t n);

/// 1 - 1/(32 log2(3d)^2).
double fannes_upper_bound(std::size_t d);
double fannes_upper_bound_from_log2(double log2_d);

struct BoundChainReport {
  /// |<phi, psi| U_A (x) U_B |00, psi>|
  double overlap = 0.0;
  double fidelity = 0.0;
  /// sqrt(1 - ||rho - xi||_1^2 / 4)
  double cap = 0.0;
  double trace_norm = 0.0;
  double entropy_rho = 0.0;
  double entropy_xi = 0.0;
  double entropy_deficit = 0.0;
  bool overlap_le_fidelity = false;
  bool fidelity_le_cap = false;
};

/// Evaluates the chain with rho and xi the (S, XA) reductions of
/// |phi>|psi> and (U_A (x) U_B)|00>|psi>. U_A acts on (S, XA), U_B on (T, XB);
/// NotUnitary unless both are square, DimensionMismatch on wrong registers.
BoundChainReport bound_chain_check(const Strategy& strategy, const LocalIsometry& u_a, const LocalIsometry& u_b,
                                   double tolerance = 1e-9);

}  // namespace cex

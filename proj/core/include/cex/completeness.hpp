#pragma once

// One extra round that lifts completeness c to nearly 1.
//
// The purified final state of a proof system is
// sqrt(1-p)|0>_A|phi0> + sqrt(p)|1>_A|phi1>, with phi0 and phi1 orthogonal and
// spread over one residual register per prover (P1..Pm). The verifier fans A
// out into A1..Am, each prover i exchanges phi1 back to phi0 controlled on
// A_i, and the verifier accepts on sqrt(1-c)|0>|0^m> + sqrt(c)|1>|1^m>.

#include <cstdint>
#include <string>
#include <utility>

#include "cex/common.hpp"
#include "cex/statevec.hpp"

namespace cex {

enum class ResidualSplit {
  /// phi0 = |0>, phi1 = |1> on prover 1's qubit; other provers hold nothing.
  first_prover,
  /// phi0 = |0^m>, phi1 = |1^m>, one qubit per prover.
  every_prover,
};

struct ProofSystemModel {
  double p = 0.0;
  double c = 0.0;
  double s = 0.0;
  std::size_t m = 1;
  PureState phi0;
  PureState phi1;

  /// Validates 0 <= s < c <= 1, p in [0, 1], orthogonality and the P1..Pm
  /// layout. DomainError otherwise.
  ProofSystemModel(double p, double c, double s, std::size_t m, PureState phi0, PureState phi1);

  static ProofSystemModel canonical(double p, double c, double s, std::size_t m,
                                    ResidualSplit split = ResidualSplit::first_prover);

  /// sqrt(1-p)|0>_A|phi0> + sqrt(p)|1>_A|phi1> over (A, P1..Pm).
  PureState final_state() const;
};

struct RoundOutcome {
  double acceptance_probability = 0.0;
  std::uint64_t n = 1;
  std::size_t m = 1;
  Backend backend = Backend::dense;
};

/// |0> -> sqrt(1-c)|0> - sqrt(c)|1>, |1> -> sqrt(c)|0> + sqrt(1-c)|1>.
LocalIsometry verifier_rotation(double c, const std::string& label = "A");

/// |b>|0^m> -> |b>|b^m>, the copies A1..Am inserted right after the source.
/// NotAQubit when the source is not two-dimensional.
PureState pseudo_copy(const PureState& state, const std::string& source_label, std::size_t m);

/// Pseudo-copy, controlled exchange, then the verifier's measurement.
/// Errors: TooLarge, BackendUnsupported, DomainError (N = 0).
RoundOutcome run_final_round(const ProofSystemModel& model, std::uint64_t n, Backend backend = Backend::dense);

/// 1 - 2c(1-c)/N.
double yes_acceptance_formula(double c, std::uint64_t n);

/// (ceiling, cap) with ceiling = (sqrt(sc) + sqrt((1-s)(1-c)))^2 and
/// cap = 1 - (c-s)^2.
std::pair<double, double> no_case_ceiling(double c, double s);

}  // namespace cex

#pragma once

// Desk-scale universal embezzling families.
//
// The net is built from the lattice D_n^+ = D_n u (D_n + 1/2) in n = 2D real
// coordinates (E8 when D = 4): every lattice point with squared norm at most
// R^2 is read as an unnormalized amplitude vector (re, im interleaved),
// normalized and phase-fixed so that its first nonzero amplitude is real and
// positive. R grows one lattice shell at a time until the estimated covering
// radius drops to epsilon. Distances are sqrt(2 - 2|<p|t>|), so a covering
// radius eps means every state has a net point with |<p|t>| >= 1 - eps^2/2.

#include <cstdint>
#include <optional>
#include <vector>

#include "cex/common.hpp"
#include "cex/exchange.hpp"
#include "cex/statevec.hpp"

namespace cex {

inline constexpr std::size_t kMaxNetPoints = 100'000;

struct NetOptions {
  /// Haar samples used to estimate the covering radius.
  std::size_t covering_samples = 64;
  /// Hill-climbing steps per sample, searching for deeper holes.
  std::size_t ascent_steps = 40;
  std::uint64_t seed = 0x5eed;
};

struct EmbezzleMember {
  PureState point;
  /// Gram-form resource |0^m> -> point; empty when the point is |0^m>.
  std::optional<ExchangeResource> resource;
};

struct EmbezzlingFamily {
  SubsystemLayout layout;
  std::uint64_t n = 1;
  double epsilon = 0.0;
  /// Squared lattice radius at which the covering estimate met epsilon.
  double radius_squared = 0.0;
  double covering_estimate = 0.0;
  std::vector<EmbezzleMember> members;

  std::size_t size() const { return members.size(); }
};

struct EmbezzleOutcome {
  std::size_t net_index = 0;
  /// |<target|p*>|.
  double target_overlap = 0.0;
  ExchangeOutcome exchange;
  /// |<target|p*>| * <E'|E>: fidelity of the produced state (with the
  /// untouched family) against the target next to the original family.
  double fidelity = 0.0;
  /// fidelity >= (1 - 1/N)(1 - eps^2/2).
  bool guarantee_met = false;
};

/// Lattice points of D_n^+ (n even) with 0 < |x|^2 <= r2, in doubled
/// coordinates (all entries even, or all odd). Stops with NetTooLarge past
/// `limit` points.
std::vector<std::vector<int>> lattice_points(std::size_t n, double r2, std::size_t limit);

/// Normalized, phase-fixed, deduplicated net from lattice points, in
/// lexicographic order of their amplitudes.
std::vector<Vector> net_from_lattice(const std::vector<std::vector<int>>& points);

/// Largest sampled value of min_p sqrt(2 - 2|<p|t>|).
double estimate_covering_radius(const std::vector<Vector>& net, std::size_t dim, const NetOptions& options);

/// Errors: DomainError (epsilon <= 0, N = 0, m = 0, dims/m disagree),
/// NetTooLarge.
EmbezzlingFamily universal_family(std::size_t m, const std::vector<std::size_t>& per_party_dims, std::uint64_t n,
                                  double epsilon, const NetOptions& options = {});

/// Selects the net point closest to `target` and exchanges |0^m> into it.
/// EmptyNet for a family without points; LayoutMismatch for a foreign target.
EmbezzleOutcome embezzle(const EmbezzlingFamily& family, const PureState& target, Backend backend = Backend::gram);

}  // namespace cex

#pragma once

// Coherent state exchange by cyclic register shifts.
//
// Each player P_i owns one subsystem of the layout shared by phi and psi (its
// label L_i is the player's input register X^i_0) and N+1 resource registers
// "L_i.1" ... "L_i.(N+1)". The resource state
//
//   |E_N> = N1^{-1/2} sum_{k=1}^{N} phi^{(x)k} (x) psi~^{(x)(N-k+1)},
//
// with psi~ = e^{-i theta} psi and <phi|psi> = a e^{i theta}, is stored with
// the registers grouped per player (player-major). A forward shift
// |x_0 x_1 ... x_{N+1}> -> |x_{N+1} x_0 ... x_N> by every player moves phi
// into the resource and pulls psi~ out; player 1 then applies e^{i theta}.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cex/common.hpp"
#include "cex/statevec.hpp"

namespace cex {

enum class ExchangeMethod { orthogonal, direct_nonorthogonal, via_intermediate };

std::string_view to_string(ExchangeMethod method);

/// Tolerance below which |<phi|psi>| counts as 1 (the phase-only case).
inline constexpr double kIdenticalTolerance = 1e-12;
/// Minimum |<source|input>|^2 accepted as the declared source state.
inline constexpr double kInputFidelityTolerance = 1e-9;

struct ExchangeResource {
  PureState phi;
  PureState psi;
  std::uint64_t n = 1;
  double a = 0.0;
  double theta = 0.0;
  PureState psi_tilde;
  double n1 = 1.0;
  ExchangeMethod method = ExchangeMethod::orthogonal;
  /// Register-name tag, so several resources can coexist in one state.
  std::string tag;
  /// Dense |E_N>; empty for resources built for Gram evaluation only.
  std::optional<PureState> state;
  /// via_intermediate only: the phi -> eta and eta -> psi resources.
  std::vector<ExchangeResource> stages;

  std::size_t players() const { return phi.layout().size(); }
  bool is_dense() const { return state.has_value(); }

  /// Register labels owned by `player`: the input register first, then the
  /// resource registers in slot order. For via_intermediate, the registers of
  /// the given stage.
  std::vector<std::string> player_registers(std::size_t player) const;
};

struct ExchangeOutcome {
  /// Contents of the input registers after the shift.
  PureState output_state;
  /// Post-shift resource |E'_N>; absent on the Gram path.
  std::optional<PureState> residual_state;
  /// <E'_N|E_N>.
  double residual_overlap = 0.0;
  /// <target| rho_out |target>.
  double output_fidelity = 0.0;
};

/// "<label>.<tag><slot>"; slot 0 is the player's own input register.
std::string resource_label(const std::string& base, std::uint64_t slot, const std::string& tag = {});

/// Builds |E_N> for the pair (phi, psi). With backend gram the dense state is
/// skipped and only (a, theta, N1) are recorded. Errors: LayoutMismatch,
/// IdenticalStates, DomainError (N = 0), TooLarge (dense over budget).
ExchangeResource build_resource(const PureState& phi, const PureState& psi, std::uint64_t n,
                                Backend backend = Backend::dense, std::string tag = {});

/// The post-forward-shift resource built directly from its definition,
/// N1^{-1/2} sum_k phi^{(x)(k+1)} psi~^{(x)(N-k)}, without running the shift.
PureState forward_residual(const ExchangeResource& resource);

/// Unitary cyclic shift on the player's N+2 registers. TooLarge when the
/// permutation matrix would exceed 4096 x 4096.
LocalIsometry shift_isometry(const ExchangeResource& resource, std::size_t player, Direction direction);

/// Runs the exchange on `input` (phi for forward, psi for backward).
/// WrongInput when `input` is not the declared source; TooLarge when the
/// input next to the dense resource exceeds the dense budget.
ExchangeOutcome exchange(const PureState& input, const ExchangeResource& resource,
                         Direction direction = Direction::forward);

/// Coherent version: `joint` holds one control qubit per player (listed in
/// player order) next to the data registers. Every player shifts conditioned
/// on its own control; the result carries the resource registers appended.
/// ControlDimMismatch when the controls are not m qubits.
PureState controlled_exchange(const PureState& joint, const ExchangeResource& resource,
                              const std::vector<std::string>& control_labels,
                              Direction direction = Direction::forward);

/// Exchange through an intermediate state eta orthogonal to phi and psi,
/// using |E_N>|F_N>. DimensionTooSmall when the shared space has dimension < 3;
/// TooLarge when the dense |E_N>|F_N> exceeds the dense budget.
ExchangeResource build_intermediate_resource(const PureState& phi, const PureState& psi, std::uint64_t n,
                                             Backend backend = Backend::dense);

/// First standard-basis Gram-Schmidt residual orthogonal to phi and psi with
/// norm above 1e-6.
PureState orthogonal_intermediate(const PureState& phi, const PureState& psi);

}  // namespace cex
